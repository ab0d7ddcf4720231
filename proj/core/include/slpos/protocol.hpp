#pragma once

#include <array>
#include <string>
#include <vector>

#include "slpos/method.hpp"

namespace slpos {

enum class EntityKind { TargetUe, AnchorUe, Amf, Lmf, Gmlc, SlServer };

// NSL sessions run through the core network (AMF/LMF, plus GMLC for the
// privacy check of UE-originated requests); USL sessions involve only UEs
// and an SL positioning server.
enum class SessionKind { NslMtLr, NslMoLr, Usl };

enum class SessionState {
  Idle,
  Requested,
  PrivacyCheck,
  AnchorSelection,
  CapabilityExchange,
  AssistanceRequested,
  AssistanceDelivered,
  Measuring,
  Computing,
  Reported,
  Failed,
};

enum class MessageKind {
  Request,
  PrivacyQuery,
  AnchorInvite,
  CapabilityInfo,
  AssistanceRequest,
  AssistanceData,
  PrsExchange,
  Result,
};
inline constexpr int kMessageKindCount = 8;

enum class SessionEvent {
  RunPrivacyCheck,
  SelectAnchors,
  ExchangeCapabilities,
  RequestAssistance,
  DeliverAssistance,
  Measure,
  Compute,
  Report,
  Drop,
};

std::string to_string(EntityKind kind);
std::string to_string(SessionKind kind);
std::string to_string(SessionState state);
std::string to_string(MessageKind kind);
std::string to_string(SessionEvent event);
SessionKind session_kind_from_string(std::string_view name);

struct Message {
  EntityKind from;
  EntityKind to;
  MessageKind kind;
  double delay_s = 0.0;
};

struct TraceEntry {
  int seq = 0;
  Message message;
  double cumulative_latency_s = 0.0;
};

// Structural latency model: constant per-message delays plus a constant
// per-stage processing time. No queuing.
struct DelayTable {
  std::array<double, kMessageKindCount> per_message_s{};
  double stage_processing_s = 0.0;

  double of(MessageKind kind) const {
    return per_message_s[static_cast<int>(kind)];
  }
  void set(MessageKind kind, double delay_s) {
    per_message_s[static_cast<int>(kind)] = delay_s;
  }
  static DelayTable uniform(double per_message_s, double stage_processing_s = 0.0);
};

// Capability payload exchanged in NSL.2 / the USL equivalent. The
// computation power field is carried opaquely and never drives logic.
struct Capability {
  std::vector<PositioningMethod> supported_methods;
  int n_antennas = 1;
  double bandwidth_hz = 0.0;
  int computation_power = 0;
};

struct MeasurementPlan {
  PositioningMethod method = PositioningMethod::Tdoa;
  int n_anchors = 3;
};

struct Session {
  SessionKind kind = SessionKind::Usl;
  SessionState state = SessionState::Idle;
  std::vector<EntityKind> participants;
  MeasurementPlan plan;
  DelayTable delays;
  Capability capability;
  std::vector<TraceEntry> trace;
  double latency_s = 0.0;
};

// Validates participants for the session kind (NSL needs AMF+LMF, MO-LR also
// GMLC, USL an SlServer and no core-network entities) and returns a session
// in Requested state with an empty trace.
Session start(SessionKind kind, const std::vector<EntityKind>& participants,
              const MeasurementPlan& plan, const DelayTable& delays,
              Capability capability = {});

// Advances exactly one stage, appending the emitted messages to the trace
// and accumulating their delays plus the stage processing time. Throws
// ProtocolError naming both event and state on an illegal pair.
std::vector<Message> step(Session& session, SessionEvent event);

// Total accumulated latency; only legal once the session is Reported or
// Failed (StateError otherwise).
double session_latency_s(const Session& session);

// The legal event order for the kind's happy path.
std::vector<SessionEvent> happy_path_events(SessionKind kind);

// Builds a minimal participant set and drives the session to Reported.
Session run_happy_path(SessionKind kind, const MeasurementPlan& plan,
                       const DelayTable& delays);

// One JSON object per line: {"seq", "from", "to", "kind",
// "cumulative_latency_s"}.
std::string trace_to_json_lines(const Session& session);

}  // namespace slpos
