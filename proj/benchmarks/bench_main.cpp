#include <benchmark/benchmark.h>

#include "sevgae/features.hpp"
#include "sevgae/model.hpp"
#include "sevgae/renderer.hpp"
#include "sevgae/synthetic.hpp"

using namespace sevgae;

namespace {

Aamg make_graph(std::uint64_t seed, int rooms_max) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.count = 1;
  cfg.rooms_min = 3;
  cfg.rooms_max = rooms_max;
  cfg.schema = SchemaVariant::Six;
  return generate_layout(cfg, 0);
}

ModelConfig bench_config() {
  ModelConfig c;
  c.style = false;
  c.labels = 6;
  c.z_dim = 64;
  c.n_max = 32;
  c.enc_layers = 2;
  c.d_h = 32;
  c.heads = 4;
  c.c_h = 16;
  c.seed = 3;
  return c;
}

}  // namespace

static void BM_GenerateLayout(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_graph(seed++, 30));
  }
}
BENCHMARK(BM_GenerateLayout);

static void BM_AssembleFeatures(benchmark::State& state) {
  Aamg g = make_graph(5, 30);
  ModelConfig cfg = bench_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_graph(g, cfg.feature_config()));
  }
}
BENCHMARK(BM_AssembleFeatures);

static void BM_ForwardBackward(benchmark::State& state) {
  ModelConfig cfg = bench_config();
  SeVgae model(cfg);
  model.init_weights();
  DenseGraph dense = assemble_graph(make_graph(5, 30), cfg.feature_config());
  Rng rng(17);
  for (auto _ : state) {
    Tape t;
    ForwardResult fr = model.forward(t, dense, &rng);
    auto [ln, le] = model.recon_losses(t, fr.decoded, dense);
    Tensor loss = t.add(ln, le);
    t.backward(loss);
    benchmark::DoNotOptimize(loss.scalar());
  }
}
BENCHMARK(BM_ForwardBackward);

static void BM_RenderPlan(benchmark::State& state) {
  Aamg g = make_graph(5, 30);
  LabelSchema schema = LabelSchema::make(g.schema);
  for (auto _ : state) {
    FloorPlanLayout plan = graph_to_plan(g);
    benchmark::DoNotOptimize(plan_svg(plan, schema));
  }
}
BENCHMARK(BM_RenderPlan);

BENCHMARK_MAIN();
