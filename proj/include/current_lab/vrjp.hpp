#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "current_lab/network.hpp"
#include "current_lab/rng.hpp"

namespace current_lab {

struct VrjpOptions {
    /// Two-point functions are enumerated exactly, so |X| is capped.
    std::size_t max_vertices = 12;
    /// Thinning horizon while away from the pass root.
    double horizon = 0.5;
    /// Proposals per pass before giving up.
    std::uint64_t event_cap = 10'000'000;
};

/// Magnetized inverse VRJP state. Passes are numbered from 1; `pass` is
/// the pass currently running (or about to run).
struct VrjpState {
    std::size_t pass = 1;
    std::size_t position = 0;
    double clock = 0.0;
    std::vector<double> weights;
    std::vector<std::size_t> order;
    CurrentConfig crossings;

    /// Weights beta, position x_1, clock 0, zero crossings.
    static VrjpState initial(const Network& net, std::vector<std::size_t> order);

    std::size_t pass_root() const { return order.at(pass - 1); }
    bool finished() const { return pass > order.size(); }
};

struct JumpEvent {
    std::size_t pass = 0;
    double time = 0.0;
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t edge = 0;
};

/// beta_e(t) <sigma_r sigma_y>_t / <sigma_r sigma_x>_t for edge e from the
/// current position x to y, r the pass root, correlations at the current weights.
double jump_rate(const Network& net, const VrjpState& state, std::size_t edge);

/// Runs the current pass to completion and advances state to the next pass.
///
/// Adjacent weights decay in closed form between events. Jumps are drawn by
/// thinning: at the root against the integrable envelope sum_e beta_e(s),
/// which also decides termination exactly; elsewhere over horizons against
/// the GKS envelope (numerators at the horizon start, denominator at its
/// end). Each proposal asserts that the true rate lies below the envelope.
std::vector<JumpEvent> run_pass(const Network& net, VrjpState& state, Rng& rng, const VrjpOptions& options = {});

struct VrjpRun {
    CurrentConfig current;
    std::vector<JumpEvent> events;
    /// Weights at the end of each pass (edges adjacent to the root at 0).
    std::vector<std::vector<double>> limit_weights;
};

VrjpRun run_vrjp_traced(const Network& net, std::span<const std::size_t> order, Rng& rng,
                        const VrjpOptions& options = {});

/// Total crossings of all k passes: a sample of the random current.
CurrentConfig run_vrjp(const Network& net, std::span<const std::size_t> order, const SeedSpec& seed,
                       const VrjpOptions& options = {});
CurrentConfig run_vrjp(const Network& net, std::span<const std::size_t> order, Rng& rng,
                       const VrjpOptions& options = {});

/// Checks that order is a permutation of the vertex set.
void validate_order(const Network& net, std::span<const std::size_t> order);

/// JSON lines: one per event, then {"current": [...]}.
void write_trace_jsonl(std::ostream& out, const VrjpRun& run);

}  // namespace current_lab
