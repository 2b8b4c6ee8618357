#include "tamc/bufferlab.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace tamc::bufferlab {

namespace {

// Replaces every "{KEY}" in text with its value.
std::string fill(std::string text, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        const std::string pattern = "{" + key + "}";
        for (std::size_t pos = text.find(pattern); pos != std::string::npos;
             pos = text.find(pattern, pos + value.size()))
            text.replace(pos, pattern.size(), value);
    }
    return text;
}

void require_non_negative(std::int64_t v, const char* what) {
    if (v < 0) throw DomainError(std::string(what) + " must be non-negative");
}

Network build(const std::string& text) { return load_network(text); }

// ── Model texts ─────────────────────────────────────────────────────────────

constexpr const char* kExisting = R"(// Existing two-way buffer system: generators G1 and G2, capacity-1 buffers
// M1 and M2, exits E1 and E2.
//
//   forward  G1 -a-> M1 -c2-> M2 -e-> E2
//   reverse  G2 -b-> M2 -c1-> M1 -d-> E1
//
// A buffer forwards in zero time (urgent hold locations) and cannot accept a
// packet while it holds one. G1 first emits at {G1} s, G2 at {G2} s, then
// both every {P} s. When both packets are in flight at the same instant, M1
// and M2 can each hold one and wait for the other forever.

clock x1, x2;
chan a, b, c1, c2, d, e;

process G1 {
    loc start inv x1 <= {G1};
    loc run inv x1 <= {P};
    init start;
    start -> run { guard x1 == {G1}; sync a!; assign x1 := 0; }
    run -> run { guard x1 == {P}; sync a!; assign x1 := 0; }
}

process G2 {
    loc start inv x2 <= {G2};
    loc run inv x2 <= {P};
    init start;
    start -> run { guard x2 == {G2}; sync b!; assign x2 := 0; }
    run -> run { guard x2 == {P}; sync b!; assign x2 := 0; }
}

process M1 {
    loc idle;
    urgent loc holdG1;
    urgent loc holdG2;
    init idle;
    idle -> holdG1 { sync a?; }
    holdG1 -> idle { sync c2!; }
    idle -> holdG2 { sync c1?; }
    holdG2 -> idle { sync d!; }
}

process M2 {
    loc idle;
    urgent loc holdG1;
    urgent loc holdG2;
    init idle;
    idle -> holdG2 { sync b?; }
    holdG2 -> idle { sync c1!; }
    idle -> holdG1 { sync c2?; }
    holdG1 -> idle { sync e!; }
}

process E1 {
    loc wait;
    loc got;
    init wait;
    wait -> got { sync d?; }
    got -> got { sync d?; }
}

process E2 {
    loc wait;
    loc got;
    init wait;
    wait -> got { sync e?; }
    got -> got { sync e?; }
}

system G1, G2, M1, M2, E1, E2;
)";

constexpr const char* kExistingQueries = R"(// The system never deadlocks.
A[] not deadlock
// A packet of G1 reaches its exit (E2 under this channel naming).
E<> E2.got
// A packet of G2 reaches its exit.
E<> E1.got
)";

// Shared by all proposed variants.
constexpr const char* kProposedTopology = R"(//   forward  G1 -a-> M1 -b-> M2 -c-> E1
//   reverse  G2 -d-> M2 -g-> Md -f-> M1 -e-> E2
//
// Buffers have capacity one; M1 and M2 serve both directions, Md only the
// reverse one. Three packets in M1 (from G1), M2 (from G2) and Md close the
// cycle M1 -> M2 -> Md -> M1 and nothing can move any more.
)";

constexpr const char* kProposedNoTime = R"(// Proposed two-way buffer system without time: every action may happen at
// any moment, only the handshakes order them.
//
{TOPOLOGY}
chan a, b, c, d, e, f, g;

process G1 {
    loc send;
    loc sent;
    init send;
    send -> sent { sync a!; }
    sent -> send { }
}

process G2 {
    loc send;
    loc sent;
    init send;
    send -> sent { sync d!; }
    sent -> send { }
}

process M1 {
    loc idle;
    loc G1_receive;
    loc G2_receive;
    init idle;
    idle -> G1_receive { sync a?; }
    G1_receive -> idle { sync b!; }
    idle -> G2_receive { sync f?; }
    G2_receive -> idle { sync e!; }
}

process M2 {
    loc idle;
    loc G1_receive;
    loc G2_receive;
    init idle;
    idle -> G1_receive { sync b?; }
    G1_receive -> idle { sync c!; }
    idle -> G2_receive { sync d?; }
    G2_receive -> idle { sync g!; }
}

process Md {
    loc idle;
    loc full;
    init idle;
    idle -> full { sync g?; }
    full -> idle { sync f!; }
}

process E1 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync c?; }
    receive -> receive { sync c?; }
}

process E2 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync e?; }
    receive -> receive { sync e?; }
}

system G1, G2, M1, M2, Md, E1, E2;
)";

constexpr const char* kProposedNoTimeQueries = R"(// The system never deadlocks.
A[] not deadlock
// M1 can hold a packet of G2.
E<> M1.G2_receive
)";

constexpr const char* kProposedDet = R"(// Proposed two-way buffer system with deterministic delays: G1 emits {A} s
// after its previous emission, G2 {B} s after its previous one, and a buffer
// holds each packet {C} s before forwarding it.
//
{TOPOLOGY}//
// A ready generator or a buffer that has held its packet long enough waits
// until the next hop can accept; nothing is ever forced by a deadline, so a
// deadlock here is a genuine circular wait, reached when G1's first packet
// enters M1 while M2 and Md hold packets of G2.

clock x1, x2, y1, y2, yd;
chan a, b, c, d, e, f, g;

process G1 {
    loc send;
    init send;
    send -> send { guard x1 >= {A}; sync a!; assign x1 := 0; }
}

process G2 {
    loc send;
    init send;
    send -> send { guard x2 >= {B}; sync d!; assign x2 := 0; }
}

process M1 {
    loc idle;
    loc G1_receive;
    loc G2_receive;
    init idle;
    idle -> G1_receive { sync a?; assign y1 := 0; }
    G1_receive -> idle { guard y1 >= {C}; sync b!; }
    idle -> G2_receive { sync f?; assign y1 := 0; }
    G2_receive -> idle { guard y1 >= {C}; sync e!; }
}

process M2 {
    loc idle;
    loc G1_receive;
    loc G2_receive;
    init idle;
    idle -> G1_receive { sync b?; assign y2 := 0; }
    G1_receive -> idle { guard y2 >= {C}; sync c!; }
    idle -> G2_receive { sync d?; assign y2 := 0; }
    G2_receive -> idle { guard y2 >= {C}; sync g!; }
}

process Md {
    loc idle;
    loc full;
    init idle;
    idle -> full { sync g?; assign yd := 0; }
    full -> idle { guard yd >= {C}; sync f!; }
}

process E1 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync c?; }
    receive -> receive { sync c?; }
}

process E2 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync e?; }
    receive -> receive { sync e?; }
}

system G1, G2, M1, M2, Md, E1, E2;
)";

constexpr const char* kProposedDetQueries = R"(// The system never deadlocks.
A[] not deadlock
)";

constexpr const char* kProposedNondet = R"(// Proposed two-way buffer system with non-deterministic windows. One clock x
// paces the whole system: G2 restarts it when it injects a packet, and the
// buffers forward inside fixed windows of the cycle, so the three buffers are
// never full at the same time.
//
{TOPOLOGY}//
// Cycle of 5 s measured by x after G2's emission:
//   (0,1]  M2 passes G2's packet to Md
//   [0,3]  G1 may emit; M1 forwards it to M2 in (2,3] and sets x to 3
//   (3,4]  M2 delivers G1's packet to E1; Md hands G2's packet to M1
//   (4,5)  M1 delivers G2's packet to E2
//   5      G2 may emit again
// Constants of G1, G2 and M1's forward path are the design values;
// reconstructed: M1's reverse window (x > 4, x < 5), M2's windows
// (x <= 1 / x > 0 and x <= 4 / x > 3, x := 4), Md's window (x <= 4 / x > 3)
// and G2 starting in its cool-down location.

clock x;
chan a, b, c, d, e, f, g;

process G1 {
    loc ready;
    loc send inv x <= 5;
    init ready;
    ready -> send { guard x >= 0; sync a!; }
    send -> ready { guard x >= 5; }
}

process G2 {
    loc ready;
    loc send inv x <= 5;
    init send;
    ready -> send { sync d!; assign x := 0; }
    send -> ready { guard x >= 5; }
}

process M1 {
    loc idle;
    loc G1_receive inv x <= 3;
    loc G2_receive inv x < 5;
    init idle;
    idle -> G1_receive { guard x >= 0; sync a?; }
    G1_receive -> idle { guard x > 2; sync b!; assign x := 3; }
    idle -> G2_receive { sync f?; }
    G2_receive -> idle { guard x > 4; sync e!; }
}

process M2 {
    loc idle;
    loc G1_receive inv x <= 4;
    loc G2_receive inv x <= 1;
    init idle;
    idle -> G1_receive { sync b?; }
    G1_receive -> idle { guard x > 3; sync c!; assign x := 4; }
    idle -> G2_receive { sync d?; }
    G2_receive -> idle { guard x > 0; sync g!; }
}

process Md {
    loc idle;
    loc full inv x <= 4;
    init idle;
    idle -> full { sync g?; }
    full -> idle { guard x > 3; sync f!; }
}

process E1 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync c?; }
    receive -> receive { sync c?; }
}

process E2 {
    loc wait;
    loc receive;
    init wait;
    wait -> receive { sync e?; }
    receive -> receive { sync e?; }
}

system G1, G2, M1, M2, Md, E1, E2;
)";

constexpr const char* kProposedNondetQueries = R"(// M1 can hold a packet of G2.
E<> M1.G2_receive
// The system never deadlocks.
A[] not deadlock
// Whenever G1 has just sent a packet, E1 eventually receives.
G1.send --> E1.receive
)";

std::string topology_filled(const char* text, std::map<std::string, std::string> values = {}) {
    values["TOPOLOGY"] = kProposedTopology;
    return fill(text, values);
}

}  // namespace

// ── Builders ────────────────────────────────────────────────────────────────

std::string existing_source(const ShiftedExisting& cfg) {
    require_non_negative(cfg.g1_offset, "offset");
    require_non_negative(cfg.g2_offset, "offset");
    require_non_negative(cfg.period, "period");
    return fill(kExisting, {{"G1", std::to_string(cfg.g1_offset)},
                            {"G2", std::to_string(cfg.g2_offset)},
                            {"P", std::to_string(cfg.period)}});
}

std::string existing_source(bool shifted) {
    return existing_source(shifted ? ShiftedExisting{} : ShiftedExisting{10, 10, 10});
}

Network build_existing(bool shifted) { return build(existing_source(shifted)); }

std::string proposed_source(const TimeModelConfig& cfg) {
    if (std::holds_alternative<NoTime>(cfg)) return topology_filled(kProposedNoTime);
    if (const auto* d = std::get_if<Deterministic>(&cfg)) {
        require_non_negative(d->g1_period, "period");
        require_non_negative(d->g2_period, "period");
        require_non_negative(d->buffer_delay, "buffer delay");
        return topology_filled(kProposedDet, {{"A", std::to_string(d->g1_period)},
                                              {"B", std::to_string(d->g2_period)},
                                              {"C", std::to_string(d->buffer_delay)}});
    }
    if (std::holds_alternative<NonDeterministic>(cfg)) return topology_filled(kProposedNondet);
    throw DomainError("the shifted configuration applies to the existing system only");
}

Network build_proposed(const TimeModelConfig& cfg) { return build(proposed_source(cfg)); }

// ── Corpus ──────────────────────────────────────────────────────────────────

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = {
        {"existing", "existing system, both generators start at 10 s", existing_source(false),
         kExistingQueries},
        {"existing_shifted", "existing system, G1 starts at 15 s and G2 at 10 s", existing_source(true),
         kExistingQueries},
        {"proposed_notime", "proposed system without time", proposed_source(NoTime{}), kProposedNoTimeQueries},
        {"proposed_det", "proposed system, deterministic delays 10/1/2 s", proposed_source(Deterministic{}),
         kProposedDetQueries},
        {"proposed_nondet", "proposed system, non-deterministic windows", proposed_source(NonDeterministic{}),
         kProposedNondetQueries},
    };
    return entries;
}

const CorpusEntry& corpus_entry(std::string_view name) {
    for (const auto& e : corpus())
        if (e.name == name) return e;
    throw NameError("unknown model '" + std::string(name) + "'");
}

std::vector<std::filesystem::path> emit(std::string_view name, const std::filesystem::path& dir) {
    const auto& e = corpus_entry(name);
    std::vector<std::filesystem::path> written;
    for (const auto& [ext, text] : {std::pair{".tam", &e.model}, std::pair{".tq", &e.queries}}) {
        auto path = dir / (e.name + ext);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << *text;
        if (!out) throw Error("cannot write " + path.string());
        written.push_back(std::move(path));
    }
    return written;
}

// ── Timing analysis ─────────────────────────────────────────────────────────

std::string_view to_string(ArrivalPoint p) {
    switch (p) {
    case ArrivalPoint::GenReady: return "GenReady";
    case ArrivalPoint::M1fromG1: return "M1fromG1";
    case ArrivalPoint::M1fromMd: return "M1fromMd";
    case ArrivalPoint::M2fromM1: return "M2fromM1";
    case ArrivalPoint::M2fromG2: return "M2fromG2";
    case ArrivalPoint::MdFromM2: return "MdFromM2";
    case ArrivalPoint::E1fromM2: return "E1fromM2";
    case ArrivalPoint::E2fromM1: return "E2fromM1";
    }
    return "?";
}

std::int64_t arrival_time(ArrivalPoint p, const TimingParams& t) {
    require_non_negative(t.zeta, "zeta");
    require_non_negative(t.theta, "theta");
    require_non_negative(t.alpha, "alpha");
    const std::int64_t z = t.zeta, th = t.theta;
    const std::int64_t cycle = t.alpha * (4 * z + th);
    switch (p) {
    case ArrivalPoint::GenReady: return cycle;
    case ArrivalPoint::M1fromG1: return z + th + cycle;
    case ArrivalPoint::M1fromMd: return 3 * z + th + cycle;
    case ArrivalPoint::M2fromM1: return 2 * z + th + cycle;
    case ArrivalPoint::M2fromG2: return z + cycle;
    case ArrivalPoint::MdFromM2: return 2 * z + th + cycle;
    case ArrivalPoint::E1fromM2: return 3 * z + th + cycle;
    case ArrivalPoint::E2fromM1: return 4 * z + th + cycle;
    }
    return 0;
}

namespace {

// ── Discrete-event run ──────────────────────────────────────────────────────
// Nodes hold at most one packet. A held packet leaves once its hold time has
// elapsed and the next node is empty; it then travels zeta and arrives. Within
// one instant departures are settled before arrivals, repeatedly, until
// nothing changes.

enum Node : std::size_t { G1, G2, M1, M2, Md, E1, E2, kNodes };

struct Hop {
    Node node;
    std::int64_t hold;
};

struct Packet {
    bool forward;  // from G1
    std::int64_t alpha;
    std::size_t hop = 0;          // index into the route of the current node
    std::int64_t since = 0;       // arrival time at the current node
    std::optional<std::int64_t> arrives;  // in flight to route[hop + 1]
};

class EventRun {
public:
    EventRun(std::int64_t zeta, std::int64_t theta, std::int64_t alpha_max)
        : zeta_(zeta), alpha_max_(alpha_max) {
        forward_ = {{G1, 0}, {M1, theta}, {M2, 0}, {E1, 0}};
        reverse_ = {{G2, 0}, {M2, 0}, {Md, theta}, {M1, 0}, {E2, 0}};
        out_.points.assign(static_cast<std::size_t>(alpha_max + 1), {});
        out_.g2_ready.assign(static_cast<std::size_t>(alpha_max + 1), 0);
        next_emit_[0] = 0;
        next_emit_[1] = 0;
    }

    SimulatedTimes run() {
        std::int64_t now = 0;
        while (!done()) {
            settle(now);
            if (done()) break;
            const auto next = next_event_time(now);
            if (!next) throw Error("timing run stalled: buffers block each other");
            now = *next;
        }
        return std::move(out_);
    }

private:
    using Route = std::vector<Hop>;

    const Route& route(const Packet& p) const { return p.forward ? forward_ : reverse_; }

    bool done() const { return finished_ == 2 * static_cast<std::size_t>(alpha_max_ + 1); }

    bool occupied(Node n) const {
        if (n == E1 || n == E2) return false;
        // A packet in flight already reserves its destination.
        return std::any_of(packets_.begin(), packets_.end(), [&](const Packet& p) {
            return route(p)[p.arrives ? p.hop + 1 : p.hop].node == n;
        });
    }

    void record(const Packet& p, ArrivalPoint point, std::int64_t t) {
        out_.points[static_cast<std::size_t>(p.alpha)][static_cast<std::size_t>(point)] = t;
    }

    void settle(std::int64_t now) {
        for (bool changed = true; changed;) {
            changed = false;
            // Emissions.
            for (int g = 0; g < 2; ++g) {
                if (!next_emit_[g] || *next_emit_[g] > now || emitted_[g] > alpha_max_) continue;
                const Node where = g == 0 ? G1 : G2;
                if (occupied(where)) continue;
                Packet p{g == 0, emitted_[g]++, 0, now, std::nullopt};
                if (g == 0) record(p, ArrivalPoint::GenReady, now);
                else out_.g2_ready[static_cast<std::size_t>(p.alpha)] = now;
                next_emit_[g].reset();
                packets_.push_back(p);
                changed = true;
            }
            // Departures.
            for (auto& p : packets_) {
                if (p.arrives) continue;
                const auto& r = route(p);
                if (p.hop + 1 >= r.size() || now < p.since + r[p.hop].hold) continue;
                if (occupied(r[p.hop + 1].node)) continue;
                if (r[p.hop].node == M1 && p.forward) record(p, ArrivalPoint::M1fromG1, now);
                if (r[p.hop].node == Md) record(p, ArrivalPoint::MdFromM2, now);
                p.arrives = now + zeta_;
                changed = true;
            }
            // Arrivals.
            for (auto& p : packets_) {
                if (!p.arrives || *p.arrives > now) continue;
                ++p.hop;
                p.since = now;
                p.arrives.reset();
                arrive(p, now);
                changed = true;
            }
            const auto before = packets_.size();
            packets_.erase(std::remove_if(packets_.begin(), packets_.end(),
                                          [&](const Packet& p) { return p.hop + 1 == route(p).size(); }),
                           packets_.end());
            changed |= packets_.size() != before;
        }
    }

    void arrive(const Packet& p, std::int64_t now) {
        switch (route(p)[p.hop].node) {
        case M1:
            if (!p.forward) record(p, ArrivalPoint::M1fromMd, now);
            break;
        case M2: record(p, p.forward ? ArrivalPoint::M2fromM1 : ArrivalPoint::M2fromG2, now); break;
        case E1:
            record(p, ArrivalPoint::E1fromM2, now);
            next_emit_[0] = now + zeta_;  // extra transfer to re-synchronize with G2
            ++finished_;
            break;
        case E2:
            record(p, ArrivalPoint::E2fromM1, now);
            next_emit_[1] = now;
            ++finished_;
            break;
        default: break;
        }
    }

    std::optional<std::int64_t> next_event_time(std::int64_t now) const {
        std::optional<std::int64_t> best;
        auto consider = [&](std::int64_t t) {
            if (t > now && (!best || t < *best)) best = t;
        };
        for (int g = 0; g < 2; ++g)
            if (next_emit_[g] && emitted_[g] <= alpha_max_) consider(*next_emit_[g]);
        for (const auto& p : packets_) {
            if (p.arrives) consider(*p.arrives);
            else consider(p.since + route(p)[p.hop].hold);
        }
        return best;
    }

    std::int64_t zeta_;
    std::int64_t alpha_max_;
    Route forward_, reverse_;
    std::vector<Packet> packets_;
    std::optional<std::int64_t> next_emit_[2];
    std::int64_t emitted_[2] = {0, 0};
    std::size_t finished_ = 0;
    SimulatedTimes out_;
};

}  // namespace

SimulatedTimes simulate_arrivals(std::int64_t zeta, std::int64_t theta, std::int64_t alpha_max) {
    require_non_negative(zeta, "zeta");
    require_non_negative(theta, "theta");
    if (alpha_max < 0) return {};
    return EventRun(zeta, theta, alpha_max).run();
}

std::vector<TimingRow> timing_table(std::int64_t zeta, std::int64_t theta, std::int64_t alpha_lo,
                                    std::int64_t alpha_hi) {
    require_non_negative(zeta, "zeta");
    require_non_negative(theta, "theta");
    require_non_negative(alpha_lo, "alpha");
    std::vector<TimingRow> rows;
    if (alpha_lo > alpha_hi) return rows;
    const auto sim = simulate_arrivals(zeta, theta, alpha_hi);
    for (std::int64_t a = alpha_lo; a <= alpha_hi; ++a)
        for (const auto p : kArrivalPoints)
            rows.push_back({p, a, arrival_time(p, {zeta, theta, a}),
                            sim.points[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)]});
    return rows;
}

std::string to_csv(const std::vector<TimingRow>& rows) {
    std::ostringstream os;
    os << "point,alpha,closed_form,measured\n";
    for (const auto& r : rows)
        os << to_string(r.point) << ',' << r.alpha << ',' << r.closed_form << ',' << r.measured << '\n';
    return os.str();
}

// ── Sizing ──────────────────────────────────────────────────────────────────

double buffer_size(double rtt_seconds, double capacity_bps) {
    if (rtt_seconds < 0 || capacity_bps < 0) throw DomainError("rtt and capacity must be non-negative");
    return rtt_seconds * capacity_bps;
}

}  // namespace tamc::bufferlab
