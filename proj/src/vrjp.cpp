#include "current_lab/vrjp.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"

namespace current_lab {

namespace {

constexpr double weight_floor = 1e-300;
constexpr double envelope_slack = 1e-9;

void decay_adjacent(const Network& net, std::vector<double>& weights, std::size_t x, double dt) {
    const double factor = std::exp(-dt);
    for (std::size_t e : net.incident(x)) {
        weights[e] *= factor;
        if (weights[e] < weight_floor) weights[e] = 0.0;
    }
}

std::size_t pick_edge(std::span<const std::size_t> incident, std::span<const double> rates, double total,
                      Rng& rng) {
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = incident.size();
    for (std::size_t k = 0; k < incident.size(); ++k) {
        if (rates[k] <= 0.0) continue;
        last_positive = k;
        acc += rates[k];
        if (target < acc) return k;
    }
    if (last_positive == incident.size()) throw InvariantError("accepted a jump with no positive rate");
    return last_positive;
}

void check_envelope(double rate, double envelope) {
    if (rate > envelope * (1.0 + envelope_slack) + 1e-300) {
        std::ostringstream msg;
        msg << "thinning envelope violated: rate " << rate << " > envelope " << envelope;
        throw InvariantError(msg.str());
    }
}

}  // namespace

void validate_order(const Network& net, std::span<const std::size_t> order) {
    if (order.size() != net.vertex_count())
        throw ContractError("vertex order must list every vertex exactly once");
    std::vector<bool> seen(net.vertex_count(), false);
    for (std::size_t x : order) {
        if (x >= net.vertex_count() || seen[x])
            throw ContractError("vertex order must be a permutation of the vertex set");
        seen[x] = true;
    }
}

VrjpState VrjpState::initial(const Network& net, std::vector<std::size_t> order) {
    validate_order(net, order);
    VrjpState s;
    s.pass = 1;
    s.position = order.front();
    s.clock = 0.0;
    s.weights = net.beta();
    s.order = std::move(order);
    s.crossings.assign(net.edge_count(), 0);
    return s;
}

double jump_rate(const Network& net, const VrjpState& state, std::size_t edge) {
    if (edge >= net.edge_count()) throw ContractError("edge out of range");
    const Edge& ed = net.edge(edge);
    const std::size_t x = state.position;
    if (ed.u != x && ed.v != x) throw ContractError("edge is not incident to the current position");
    if (state.weights[edge] == 0.0) return 0.0;
    const std::size_t root = state.pass_root();
    if (ed.is_loop()) return state.weights[edge];
    const auto corr = correlations_with(net, root, state.weights);
    if (corr[x] < weight_floor) throw DegenerateStateError("two-point denominator underflow");
    return state.weights[edge] * corr[ed.other(x)] / corr[x];
}

std::vector<JumpEvent> run_pass(const Network& net, VrjpState& state, Rng& rng, const VrjpOptions& options) {
    if (state.finished()) throw ContractError("all passes already completed");
    if (net.vertex_count() > options.max_vertices) {
        std::ostringstream msg;
        msg << "jump process: " << net.vertex_count() << " vertices exceed the exact two-point limit of "
            << options.max_vertices;
        throw CapacityError(msg.str());
    }
    const std::size_t root = state.pass_root();
    auto& w = state.weights;
    std::size_t x = root;
    double t = 0.0;
    std::vector<JumpEvent> events;
    std::vector<double> rates;
    std::uint64_t proposals = 0;

    auto bump = [&] {
        if (++proposals > options.event_cap)
            throw RunawayError("jump process exceeded the event cap; the thinning envelope is suspect");
    };
    auto jump = [&](std::size_t e) {
        const std::size_t y = net.edge(e).other(x);
        events.push_back({state.pass, t, x, y, e});
        ++state.crossings[e];
        x = y;
    };

    for (;;) {
        const auto incident = net.incident(x);
        rates.assign(incident.size(), 0.0);
        if (x == root) {
            // Envelope sum_e beta_e(s) = B e^{-(s - t)} has total mass B, so
            // "no further proposal" has probability e^{-B}.
            bump();
            double mass = 0.0;
            for (std::size_t e : incident) mass += w[e];
            if (!(mass > 0.0)) break;
            const double draw = standard_exponential(rng);
            if (draw >= mass) break;
            const double dt = -std::log1p(-draw / mass);
            decay_adjacent(net, w, x, dt);
            t += dt;

            const auto corr = correlations_with(net, root, w);
            double envelope = 0.0, rate = 0.0;
            for (std::size_t k = 0; k < incident.size(); ++k) {
                const Edge& ed = net.edge(incident[k]);
                envelope += w[incident[k]];
                rates[k] = w[incident[k]] * (ed.is_loop() ? 1.0 : corr[ed.other(x)]);
                rate += rates[k];
            }
            check_envelope(rate, envelope);
            if (uniform01(rng) * envelope < rate) jump(incident[pick_edge(incident, rates, rate, rng)]);
            continue;
        }

        // Away from the root: one thinning horizon [t, t + horizon].
        const double horizon_end = t + options.horizon;
        std::vector<double> w_end = w;
        decay_adjacent(net, w_end, x, options.horizon);
        const auto corr_start = correlations_with(net, root, w);
        const auto corr_end = correlations_with(net, root, w_end);
        if (corr_end[x] < weight_floor) throw DegenerateStateError("two-point denominator underflow");
        double envelope = 0.0;
        for (std::size_t e : incident) {
            const Edge& ed = net.edge(e);
            envelope += w[e] * (ed.is_loop() ? corr_start[x] : corr_start[ed.other(x)]);
        }
        envelope /= corr_end[x];
        if (!(envelope > 0.0)) throw DegenerateStateError("jump process stuck away from the pass root");

        for (;;) {
            bump();
            const double s = t + standard_exponential(rng) / envelope;
            if (s >= horizon_end) {
                decay_adjacent(net, w, x, horizon_end - t);
                t = horizon_end;
                break;
            }
            decay_adjacent(net, w, x, s - t);
            t = s;
            const auto corr = correlations_with(net, root, w);
            if (corr[x] < weight_floor) throw DegenerateStateError("two-point denominator underflow");
            double rate = 0.0;
            for (std::size_t k = 0; k < incident.size(); ++k) {
                const Edge& ed = net.edge(incident[k]);
                rates[k] = w[incident[k]] * (ed.is_loop() ? 1.0 : corr[ed.other(x)] / corr[x]);
                rate += rates[k];
            }
            check_envelope(rate, envelope);
            if (uniform01(rng) * envelope < rate) {
                jump(incident[pick_edge(incident, rates, rate, rng)]);
                break;
            }
        }
    }

    // Sitting at the root with no further jumps: adjacent weights decay to 0.
    for (std::size_t e : net.incident(root)) w[e] = 0.0;
    state.position = root;
    state.clock = t;
    ++state.pass;
    if (!state.finished()) {
        state.position = state.pass_root();
        state.clock = 0.0;
    }
    return events;
}

VrjpRun run_vrjp_traced(const Network& net, std::span<const std::size_t> order, Rng& rng,
                        const VrjpOptions& options) {
    VrjpState state = VrjpState::initial(net, std::vector<std::size_t>(order.begin(), order.end()));
    VrjpRun run;
    while (!state.finished()) {
        auto events = run_pass(net, state, rng, options);
        run.events.insert(run.events.end(), events.begin(), events.end());
        run.limit_weights.push_back(state.weights);
    }
    if (!incidence_parity_check(net, std::span<const std::uint32_t>(state.crossings)))
        throw InvariantError("jump process produced a current with sources");
    run.current = std::move(state.crossings);
    return run;
}

CurrentConfig run_vrjp(const Network& net, std::span<const std::size_t> order, Rng& rng,
                       const VrjpOptions& options) {
    VrjpState state = VrjpState::initial(net, std::vector<std::size_t>(order.begin(), order.end()));
    while (!state.finished()) run_pass(net, state, rng, options);
    if (!incidence_parity_check(net, std::span<const std::uint32_t>(state.crossings)))
        throw InvariantError("jump process produced a current with sources");
    return std::move(state.crossings);
}

CurrentConfig run_vrjp(const Network& net, std::span<const std::size_t> order, const SeedSpec& seed,
                       const VrjpOptions& options) {
    Rng rng = make_rng(seed);
    return run_vrjp(net, order, rng, options);
}

void write_trace_jsonl(std::ostream& out, const VrjpRun& run) {
    for (const JumpEvent& ev : run.events) {
        nlohmann::json j = {{"pass", ev.pass}, {"time", ev.time}, {"from", ev.from}, {"to", ev.to}, {"edge", ev.edge}};
        out << j.dump() << '\n';
    }
    out << nlohmann::json{{"current", run.current}}.dump() << '\n';
}

}  // namespace current_lab
