#include "brepair/boolean.hpp"

namespace brepair {

PipelineRun run_pipeline(const Body& a, const Body& b, BooleanOp op, const PipelineOptions& opts) {
  PipelineRun run;
  const auto fail = [&](const char* stage, const std::exception& e) {
    run.failed_stage = stage;
    run.error = e.what();
    return run;
  };
  try {
    run.intersect = stage_intersect(a, b, {opts.t0, opts.perturbation, opts.repair});
  } catch (const std::exception& e) {
    return fail("intersect", e);
  }
  run.graph = run.intersect.graph;
  run.repairs = run.intersect.deviations;
  if (opts.repair) {
    try {
      const BodySet bodies{&a, &b};
      const auto records = repair_pass(run.graph, bodies, {opts.t0});
      run.repairs.insert(run.repairs.end(), records.begin(), records.end());
    } catch (const std::exception& e) {
      return fail("repair", e);
    }
  }
  try {
    run.imprint = stage_imprint(a, b, run.graph, opts.t0);
  } catch (const std::exception& e) {
    return fail("imprint", e);
  }
  try {
    run.classification = stage_classify(run.imprint->a, run.imprint->b, op, opts.t0);
  } catch (const std::exception& e) {
    return fail("classify", e);
  }
  try {
    run.merge = stage_merge(run.imprint->a, run.imprint->b, *run.classification, opts.t0);
  } catch (const std::exception& e) {
    return fail("merge", e);
  }
  return run;
}

}  // namespace brepair
