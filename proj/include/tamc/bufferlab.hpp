#ifndef TAMC_BUFFERLAB_HPP
#define TAMC_BUFFERLAB_HPP

// Bidirectional buffer pipelines: model builders for the existing and the
// proposed topologies under several time models, the closed-form timing
// analysis of the proposed system, and the bandwidth-delay buffer sizing rule.

#include "tamc/modelspec.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace tamc::bufferlab {

// ── Time models ─────────────────────────────────────────────────────────────

struct NoTime {
    friend bool operator==(const NoTime&, const NoTime&) = default;
};

// Generator periods and per-hop buffer delay, in seconds.
struct Deterministic {
    std::int32_t g1_period = 10;
    std::int32_t g2_period = 1;
    std::int32_t buffer_delay = 2;
    friend bool operator==(const Deterministic&, const Deterministic&) = default;
};

// Fixed windows: generators may send anywhere inside their window, buffers
// forward inside theirs. The constants are part of the model text.
struct NonDeterministic {
    friend bool operator==(const NonDeterministic&, const NonDeterministic&) = default;
};

struct ShiftedExisting {
    std::int32_t g1_offset = 15;
    std::int32_t g2_offset = 10;
    std::int32_t period = 10;
    friend bool operator==(const ShiftedExisting&, const ShiftedExisting&) = default;
};

using TimeModelConfig = std::variant<NoTime, Deterministic, NonDeterministic, ShiftedExisting>;

// ── Builders ────────────────────────────────────────────────────────────────

// Two generators, two capacity-1 buffers, two exits. Unshifted: both
// generators first emit at 10 s; shifted: 15 s and 10 s, period 10 s.
std::string existing_source(bool shifted);
std::string existing_source(const ShiftedExisting& cfg);
Network build_existing(bool shifted);

// Two generators, three buffers (M1, M2 and the dummy Md), two exits.
// ShiftedExisting is not a proposed-system configuration (DomainError).
std::string proposed_source(const TimeModelConfig& cfg);
Network build_proposed(const TimeModelConfig& cfg);

// ── Corpus ──────────────────────────────────────────────────────────────────

struct CorpusEntry {
    std::string name;
    std::string description;
    std::string model;    // .tam text
    std::string queries;  // .tq text
};

const std::vector<CorpusEntry>& corpus();
// Throws NameError for an unknown name.
const CorpusEntry& corpus_entry(std::string_view name);
// Writes <dir>/<name>.tam and <dir>/<name>.tq; returns the written paths.
std::vector<std::filesystem::path> emit(std::string_view name, const std::filesystem::path& dir);

// A simulation seed that runs the no-time model into its deadlock within 20
// steps (found by seed search; 8 steps with the current corpus).
inline constexpr std::uint64_t kNoTimeDeadlockSeed = 1;

// ── Timing analysis ─────────────────────────────────────────────────────────

// zeta: channel transfer time; theta: hold delay at M1 and Md; alpha:
// iteration index.
struct TimingParams {
    std::int64_t zeta = 0;
    std::int64_t theta = 0;
    std::int64_t alpha = 0;
};

enum class ArrivalPoint : std::uint8_t {
    GenReady,
    M1fromG1,
    M1fromMd,
    M2fromM1,
    M2fromG2,
    MdFromM2,
    E1fromM2,
    E2fromM1,
};

inline constexpr ArrivalPoint kArrivalPoints[] = {
    ArrivalPoint::GenReady, ArrivalPoint::M1fromG1, ArrivalPoint::M1fromMd, ArrivalPoint::M2fromM1,
    ArrivalPoint::M2fromG2, ArrivalPoint::MdFromM2, ArrivalPoint::E1fromM2, ArrivalPoint::E2fromM1};

std::string_view to_string(ArrivalPoint p);

// Closed form; DomainError on negative parameters.
std::int64_t arrival_time(ArrivalPoint p, const TimingParams& t);

// Event times observed by a discrete-event run of the proposed system with
// capacity-1 buffers, transfer time zeta and hold theta at M1 (forward
// packets) and Md. Index [alpha][point]; g2_ready holds G2's emission times
// (GenReady refers to G1).
struct SimulatedTimes {
    std::vector<std::array<std::int64_t, 8>> points;
    std::vector<std::int64_t> g2_ready;
};

SimulatedTimes simulate_arrivals(std::int64_t zeta, std::int64_t theta, std::int64_t alpha_max);

struct TimingRow {
    ArrivalPoint point;
    std::int64_t alpha;
    std::int64_t closed_form;
    std::int64_t measured;
};

// Rows for alpha in [alpha_lo, alpha_hi], all eight points per alpha; empty
// when alpha_lo > alpha_hi.
std::vector<TimingRow> timing_table(std::int64_t zeta, std::int64_t theta, std::int64_t alpha_lo,
                                    std::int64_t alpha_hi);

// "point,alpha,closed_form,measured" followed by one line per row.
std::string to_csv(const std::vector<TimingRow>& rows);

// ── Sizing ──────────────────────────────────────────────────────────────────

// Bandwidth-delay product B = RTT * C (seconds * bits/s -> bits).
double buffer_size(double rtt_seconds, double capacity_bps);

}  // namespace tamc::bufferlab

#endif  // TAMC_BUFFERLAB_HPP
