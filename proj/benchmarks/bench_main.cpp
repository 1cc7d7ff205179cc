#include <benchmark/benchmark.h>

#include "conman/chain.hpp"
#include "conman/cluster.hpp"
#include "conman/embed.hpp"
#include "conman/extract.hpp"
#include "conman/lure.hpp"
#include "conman/normalize.hpp"
#include "conman/platform_sim.hpp"
#include "conman/random.hpp"

using namespace conman;

namespace {

SimOutput make_sim(int scammers) {
  static const auto plan = schedule_posts(default_profiles(4, 0), 250, 0, 15 * kMinute, default_bank(), 1);
  SimConfig sc;
  sc.seed = 1;
  sc.n_scammers = scammers;
  sc.planted_campaigns = plant_campaigns(scammers / 10, scammers, 1);
  return run_sim(sc, plan);
}

void BM_Normalize(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_identifier("Wallet.Fix+desk@GMAIL.com", ChannelKind::Email));
    benchmark::DoNotOptimize(
        normalize_identifier("https://docs.google.com/forms/d/e/AbC/viewform?usp=sf", ChannelKind::Form));
  }
}
BENCHMARK(BM_Normalize);

void BM_ExtractChannels(benchmark::State& state) {
  const auto sim = make_sim(static_cast<int>(state.range(0)));
  const ChannelExtractor ex(default_rules());
  for (auto _ : state) {
    auto c = collect_channels(sim.interactions, ex, {}, {}, 1);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.interactions.size()));
}
BENCHMARK(BM_ExtractChannels)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ClusterAndGroup(benchmark::State& state) {
  const auto sim = make_sim(static_cast<int>(state.range(0)));
  const auto c = collect_channels(sim.interactions, ChannelExtractor(default_rules()), {}, {}, 1);
  for (auto _ : state) {
    const auto set = build_clusters(c.sightings);
    benchmark::DoNotOptimize(agglomerate_groups(set.clusters));
  }
}
BENCHMARK(BM_ClusterAndGroup)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SingleLinkage(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(3);
  Matrix pts{n, 8, std::vector<double>(n * 8)};
  for (auto& v : pts.data) v = rng.uniform() * 10;
  std::vector<AccountId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "a" + std::to_string(i);
  for (auto _ : state) benchmark::DoNotOptimize(single_linkage_cluster(pts, ids, 2.0, 10));
}
BENCHMARK(BM_SingleLinkage)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Cospend(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(5);
  std::vector<BtcTx> ledger;
  for (std::size_t i = 0; i < n; ++i) {
    BtcTx tx;
    tx.txid = "t" + std::to_string(i);
    for (int k = 0; k < 1 + static_cast<int>(rng.below(3)); ++k)
      tx.inputs.push_back({"a" + std::to_string(rng.below(n)), 1000});
    tx.outputs.push_back({"a" + std::to_string(rng.below(n)), 900});
    tx.at = static_cast<Timestamp>(i);
    ledger.push_back(std::move(tx));
  }
  for (auto _ : state) benchmark::DoNotOptimize(cospend_clusters(ledger));
}
BENCHMARK(BM_Cospend)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
