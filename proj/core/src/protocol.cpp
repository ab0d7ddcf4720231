#include "slpos/protocol.hpp"

#include <algorithm>
#include <sstream>

#include "slpos/errors.hpp"
#include "slpos/measurement.hpp"

namespace slpos {

namespace {

int count_kind(const std::vector<EntityKind>& participants, EntityKind kind) {
  return static_cast<int>(
      std::count(participants.begin(), participants.end(), kind));
}

bool is_core_network(EntityKind kind) {
  return kind == EntityKind::Amf || kind == EntityKind::Lmf ||
         kind == EntityKind::Gmlc;
}

SessionState state_after(SessionEvent event) {
  switch (event) {
    case SessionEvent::RunPrivacyCheck: return SessionState::PrivacyCheck;
    case SessionEvent::SelectAnchors: return SessionState::AnchorSelection;
    case SessionEvent::ExchangeCapabilities: return SessionState::CapabilityExchange;
    case SessionEvent::RequestAssistance: return SessionState::AssistanceRequested;
    case SessionEvent::DeliverAssistance: return SessionState::AssistanceDelivered;
    case SessionEvent::Measure: return SessionState::Measuring;
    case SessionEvent::Compute: return SessionState::Computing;
    case SessionEvent::Report: return SessionState::Reported;
    case SessionEvent::Drop: return SessionState::Failed;
  }
  throw UsageError("unknown session event");
}

// The single legal (state, event) successor per session kind.
SessionEvent expected_event(SessionKind kind, SessionState state) {
  switch (state) {
    case SessionState::Requested:
      return kind == SessionKind::NslMoLr ? SessionEvent::RunPrivacyCheck
                                          : SessionEvent::SelectAnchors;
    case SessionState::PrivacyCheck:
      return SessionEvent::SelectAnchors;
    case SessionState::AnchorSelection:
      return SessionEvent::ExchangeCapabilities;
    case SessionState::CapabilityExchange:
      return kind == SessionKind::Usl ? SessionEvent::Measure
                                      : SessionEvent::RequestAssistance;
    case SessionState::AssistanceRequested:
      return SessionEvent::DeliverAssistance;
    case SessionState::AssistanceDelivered:
      return SessionEvent::Measure;
    case SessionState::Measuring:
      return SessionEvent::Compute;
    case SessionState::Computing:
      return SessionEvent::Report;
    default:
      throw StateError("session has no successor state");
  }
}

}  // namespace

DelayTable DelayTable::uniform(double per_message_s, double stage_processing_s) {
  DelayTable table;
  table.per_message_s.fill(per_message_s);
  table.stage_processing_s = stage_processing_s;
  return table;
}

std::string to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::TargetUe: return "target-ue";
    case EntityKind::AnchorUe: return "anchor-ue";
    case EntityKind::Amf: return "amf";
    case EntityKind::Lmf: return "lmf";
    case EntityKind::Gmlc: return "gmlc";
    case EntityKind::SlServer: return "sl-server";
  }
  throw UsageError("unknown entity kind");
}

std::string to_string(SessionKind kind) {
  switch (kind) {
    case SessionKind::NslMtLr: return "nsl-mt-lr";
    case SessionKind::NslMoLr: return "nsl-mo-lr";
    case SessionKind::Usl: return "usl";
  }
  throw UsageError("unknown session kind");
}

std::string to_string(SessionState state) {
  switch (state) {
    case SessionState::Idle: return "idle";
    case SessionState::Requested: return "requested";
    case SessionState::PrivacyCheck: return "privacy-check";
    case SessionState::AnchorSelection: return "anchor-selection";
    case SessionState::CapabilityExchange: return "capability-exchange";
    case SessionState::AssistanceRequested: return "assistance-requested";
    case SessionState::AssistanceDelivered: return "assistance-delivered";
    case SessionState::Measuring: return "measuring";
    case SessionState::Computing: return "computing";
    case SessionState::Reported: return "reported";
    case SessionState::Failed: return "failed";
  }
  throw UsageError("unknown session state");
}

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Request: return "request";
    case MessageKind::PrivacyQuery: return "privacy-query";
    case MessageKind::AnchorInvite: return "anchor-invite";
    case MessageKind::CapabilityInfo: return "capability-info";
    case MessageKind::AssistanceRequest: return "assistance-request";
    case MessageKind::AssistanceData: return "assistance-data";
    case MessageKind::PrsExchange: return "prs-exchange";
    case MessageKind::Result: return "result";
  }
  throw UsageError("unknown message kind");
}

std::string to_string(SessionEvent event) {
  switch (event) {
    case SessionEvent::RunPrivacyCheck: return "run-privacy-check";
    case SessionEvent::SelectAnchors: return "select-anchors";
    case SessionEvent::ExchangeCapabilities: return "exchange-capabilities";
    case SessionEvent::RequestAssistance: return "request-assistance";
    case SessionEvent::DeliverAssistance: return "deliver-assistance";
    case SessionEvent::Measure: return "measure";
    case SessionEvent::Compute: return "compute";
    case SessionEvent::Report: return "report";
    case SessionEvent::Drop: return "drop";
  }
  throw UsageError("unknown session event");
}

SessionKind session_kind_from_string(std::string_view name) {
  if (name == "nsl-mt-lr") return SessionKind::NslMtLr;
  if (name == "nsl-mo-lr") return SessionKind::NslMoLr;
  if (name == "usl") return SessionKind::Usl;
  throw ConfigurationError("unknown session kind: " + std::string(name));
}

Session start(SessionKind kind, const std::vector<EntityKind>& participants,
              const MeasurementPlan& plan, const DelayTable& delays,
              Capability capability) {
  if (count_kind(participants, EntityKind::TargetUe) != 1) {
    throw ConfigurationError("session needs exactly one target UE");
  }
  const int n_anchors = count_kind(participants, EntityKind::AnchorUe);
  if (n_anchors < 1) {
    throw ConfigurationError("session needs at least one anchor UE");
  }
  if (plan.n_anchors != n_anchors) {
    throw ConfigurationError(
        "measurement plan anchor count does not match the participants");
  }
  if (kind == SessionKind::Usl) {
    if (count_kind(participants, EntityKind::SlServer) < 1) {
      throw ConfigurationError("USL session needs an SL positioning server");
    }
    for (EntityKind p : participants) {
      if (is_core_network(p)) {
        throw ConfigurationError("USL session must not contain AMF/LMF/GMLC");
      }
    }
  } else {
    if (count_kind(participants, EntityKind::Amf) < 1 ||
        count_kind(participants, EntityKind::Lmf) < 1) {
      throw ConfigurationError("NSL session needs AMF and LMF");
    }
    if (kind == SessionKind::NslMoLr &&
        count_kind(participants, EntityKind::Gmlc) < 1) {
      throw ConfigurationError("MO-LR session needs a GMLC for the privacy check");
    }
  }

  Session session;
  session.kind = kind;
  session.state = SessionState::Requested;
  session.participants = participants;
  session.plan = plan;
  session.delays = delays;
  session.capability = std::move(capability);
  return session;
}

std::vector<Message> step(Session& session, SessionEvent event) {
  if (session.state == SessionState::Reported ||
      session.state == SessionState::Failed ||
      session.state == SessionState::Idle) {
    throw ProtocolError("event " + to_string(event) + " illegal in state " +
                        to_string(session.state));
  }
  if (event != SessionEvent::Drop &&
      event != expected_event(session.kind, session.state)) {
    throw ProtocolError("event " + to_string(event) + " illegal in state " +
                        to_string(session.state));
  }

  const int n_anchors = count_kind(session.participants, EntityKind::AnchorUe);
  std::vector<Message> emitted;
  auto emit = [&](EntityKind from, EntityKind to, MessageKind kind) {
    emitted.push_back({from, to, kind, session.delays.of(kind)});
  };
  const EntityKind coordinator = session.kind == SessionKind::Usl
                                     ? EntityKind::SlServer
                                     : EntityKind::Lmf;

  switch (event) {
    case SessionEvent::Drop:
      break;
    case SessionEvent::RunPrivacyCheck:
      emit(EntityKind::TargetUe, EntityKind::Gmlc, MessageKind::PrivacyQuery);
      break;
    case SessionEvent::SelectAnchors:
      if (session.kind == SessionKind::NslMtLr) {
        emit(EntityKind::Amf, EntityKind::TargetUe, MessageKind::Request);
      } else if (session.kind == SessionKind::NslMoLr) {
        emit(EntityKind::TargetUe, EntityKind::Amf, MessageKind::Request);
      } else {
        emit(EntityKind::TargetUe, EntityKind::SlServer, MessageKind::Request);
      }
      for (int i = 0; i < n_anchors; ++i) {
        emit(EntityKind::TargetUe, EntityKind::AnchorUe, MessageKind::AnchorInvite);
      }
      break;
    case SessionEvent::ExchangeCapabilities:
      for (int i = 0; i < n_anchors; ++i) {
        emit(EntityKind::AnchorUe, EntityKind::TargetUe, MessageKind::CapabilityInfo);
      }
      break;
    case SessionEvent::RequestAssistance:
      emit(EntityKind::TargetUe, EntityKind::Amf, MessageKind::AssistanceRequest);
      emit(EntityKind::Amf, EntityKind::Lmf, MessageKind::AssistanceRequest);
      break;
    case SessionEvent::DeliverAssistance:
      emit(EntityKind::Lmf, EntityKind::TargetUe, MessageKind::AssistanceData);
      break;
    case SessionEvent::Measure: {
      const int n_prs =
          prs_transmission_count(session.plan.method, session.plan.n_anchors);
      const bool anchors_transmit =
          session.plan.method == PositioningMethod::ToaMultilat ||
          session.plan.method == PositioningMethod::Tdoa;
      for (int i = 0; i < n_prs; ++i) {
        // RTT exchanges alternate direction; one-way methods keep it fixed.
        const bool forward = anchors_transmit ? false : (i % 2 == 0);
        emit(forward ? EntityKind::TargetUe : EntityKind::AnchorUe,
             forward ? EntityKind::AnchorUe : EntityKind::TargetUe,
             MessageKind::PrsExchange);
      }
      break;
    }
    case SessionEvent::Compute:
      break;
    case SessionEvent::Report:
      emit(EntityKind::TargetUe, coordinator, MessageKind::Result);
      break;
  }

  session.state = state_after(event);
  if (event != SessionEvent::Drop) {
    session.latency_s += session.delays.stage_processing_s;
  }
  for (const Message& message : emitted) {
    session.latency_s += message.delay_s;
    session.trace.push_back({static_cast<int>(session.trace.size()), message,
                             session.latency_s});
  }
  return emitted;
}

double session_latency_s(const Session& session) {
  if (session.state != SessionState::Reported &&
      session.state != SessionState::Failed) {
    throw StateError("session latency is only defined once Reported or Failed");
  }
  return session.latency_s;
}

std::vector<SessionEvent> happy_path_events(SessionKind kind) {
  switch (kind) {
    case SessionKind::NslMtLr:
      return {SessionEvent::SelectAnchors, SessionEvent::ExchangeCapabilities,
              SessionEvent::RequestAssistance, SessionEvent::DeliverAssistance,
              SessionEvent::Measure, SessionEvent::Compute, SessionEvent::Report};
    case SessionKind::NslMoLr:
      return {SessionEvent::RunPrivacyCheck, SessionEvent::SelectAnchors,
              SessionEvent::ExchangeCapabilities, SessionEvent::RequestAssistance,
              SessionEvent::DeliverAssistance, SessionEvent::Measure,
              SessionEvent::Compute, SessionEvent::Report};
    case SessionKind::Usl:
      return {SessionEvent::SelectAnchors, SessionEvent::ExchangeCapabilities,
              SessionEvent::Measure, SessionEvent::Compute, SessionEvent::Report};
  }
  throw UsageError("unknown session kind");
}

Session run_happy_path(SessionKind kind, const MeasurementPlan& plan,
                       const DelayTable& delays) {
  std::vector<EntityKind> participants{EntityKind::TargetUe};
  for (int i = 0; i < plan.n_anchors; ++i) {
    participants.push_back(EntityKind::AnchorUe);
  }
  if (kind == SessionKind::Usl) {
    participants.push_back(EntityKind::SlServer);
  } else {
    participants.push_back(EntityKind::Amf);
    participants.push_back(EntityKind::Lmf);
    if (kind == SessionKind::NslMoLr) participants.push_back(EntityKind::Gmlc);
  }
  Session session = start(kind, participants, plan, delays);
  for (SessionEvent event : happy_path_events(kind)) {
    step(session, event);
  }
  return session;
}

std::string trace_to_json_lines(const Session& session) {
  std::ostringstream out;
  for (const TraceEntry& entry : session.trace) {
    out << "{\"seq\":" << entry.seq << ",\"from\":\""
        << to_string(entry.message.from) << "\",\"to\":\""
        << to_string(entry.message.to) << "\",\"kind\":\""
        << to_string(entry.message.kind) << "\",\"cumulative_latency_s\":"
        << entry.cumulative_latency_s << "}\n";
  }
  return out.str();
}

}  // namespace slpos
