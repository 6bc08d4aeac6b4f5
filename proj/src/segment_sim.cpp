#include "nonstat/segment_sim.hpp"

#include "nonstat/bootstrap.hpp"
#include "nonstat/error.hpp"
#include "nonstat/log.hpp"
#include "nonstat/random.hpp"

namespace nonstat {

std::string SegmentPlan::tag() const {
    return method == SimMethod::Var ? "var(" + std::to_string(order) + ")"
                                    : "bootstrap(" + std::to_string(block_length) + ")";
}

SegmentPlan plan_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment, const SegmentSimConfig& cfg) {
    const Index n = segment.rows();
    if (n < 20) throw InsufficientData("segment simulation needs at least 20 rows, got " + std::to_string(n));
    SegmentPlan plan;
    plan.source = segment;
    const int max_order = cfg.max_order.value_or(default_max_order(n, segment.cols()));

    try {
        plan.order = select_order(segment, max_order, cfg.criterion).order;
    } catch (const RankDeficient&) {
        plan.order = -1;
    }

    if (plan.order >= 0 && plan.order < cfg.parametric_cutoff) {
        try {
            VarModel model = fit_var(segment, plan.order);
            if (model.stable()) {
                plan.method = SimMethod::Var;
                plan.model = std::move(model);
                return plan;
            }
            warn("fitted VAR(" + std::to_string(plan.order) + ") is unstable; using block bootstrap");
        } catch (const RankDeficient&) {
            warn("VAR(" + std::to_string(plan.order) + ") fit is rank deficient; using block bootstrap");
        }
    }
    plan.method = SimMethod::Bootstrap;
    plan.block_length = block_length(segment, BlockScheme::MovingBlock);
    return plan;
}

SegmentPlan plan_short_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment) {
    if (segment.rows() < 1) throw InsufficientData("empty segment");
    SegmentPlan plan;
    plan.source = segment;
    plan.method = SimMethod::Bootstrap;
    plan.order = -1;
    plan.block_length = 1;
    return plan;
}

Eigen::MatrixXd draw_segment(const SegmentPlan& plan, std::uint64_t seed) {
    if (plan.method == SimMethod::Var) return simulate_var(*plan.model, plan.length(), seed);
    return block_bootstrap(BootstrapSampler(plan.source, plan.block_length), plan.length(), seed);
}

SegmentSimulation simulate_segment(const Eigen::Ref<const Eigen::MatrixXd>& segment, std::uint64_t seed,
                                   const SegmentSimConfig& cfg) {
    SegmentSimulation sim;
    sim.plan = plan_segment(segment, cfg);
    sim.data = draw_segment(sim.plan, seed);
    return sim;
}

}  // namespace nonstat
