//! Cross-checks of every solver against independent oracles: exhaustive
//! enumeration for storage optima, Bellman-Ford for distances, and direct
//! recomputation for evaluator arithmetic.

mod common;

use common::{random_graph, InstanceShape};
use verstore::exact::{enumerate_optimal, ConstraintKind, Objective, ObjectiveKind};
use verstore::heuristics;
use verstore::plan::evaluate;
use verstore::spanners;

#[test]
fn spanning_solvers_match_enumeration_on_small_instances() {
    for seed in 0..40u64 {
        let shape = InstanceShape {
            n: 6,
            directed: seed % 2 == 0,
            density: 0.6,
            decoupled_recreation: seed % 3 == 0,
        };
        let sg = random_graph(shape, 100 + seed);
        let plan = spanners::min_storage(&sg).unwrap();
        let cost = evaluate(&plan, &sg, None).unwrap().total_storage;
        let (_, optimum) =
            enumerate_optimal(&sg, Objective::new(ObjectiveKind::MinStorage)).unwrap();
        assert_eq!(cost, optimum, "seed {seed}");
    }
}

#[test]
fn shortest_path_tree_matches_bellman_ford() {
    for seed in 0..40u64 {
        let shape = InstanceShape {
            n: 7,
            directed: seed % 2 == 1,
            density: 0.5,
            decoupled_recreation: true,
        };
        let sg = random_graph(shape, 200 + seed);
        let (plan, dist) = spanners::spt_with_distances(&sg).unwrap();
        let expected = common::bellman_ford_distances(&sg);
        assert_eq!(dist, expected, "seed {seed}");
        let report = evaluate(&plan, &sg, None).unwrap();
        for v in 1..=7 {
            assert_eq!(
                report.recreation_of(v),
                expected[v],
                "seed {seed} version {v}"
            );
        }
    }
}

#[test]
fn extremes_bracket_every_other_solver() {
    for seed in 0..30u64 {
        let shape = InstanceShape {
            n: 7,
            directed: true,
            density: 0.7,
            decoupled_recreation: seed % 2 == 0,
        };
        let sg = random_graph(shape, 300 + seed);
        let mca = spanners::min_storage(&sg).unwrap();
        let mca_report = evaluate(&mca, &sg, None).unwrap();
        let spt = spanners::spt(&sg).unwrap();
        let spt_report = evaluate(&spt, &sg, None).unwrap();
        assert!(mca_report.total_storage <= spt_report.total_storage);
        assert!(spt_report.max_recreation <= mca_report.max_recreation);
    }
}

#[test]
fn budgeted_greedy_reaches_shortest_path_sums_with_full_budget() {
    for seed in 0..25u64 {
        let shape = InstanceShape {
            n: 8,
            directed: seed % 2 == 0,
            density: 0.6,
            decoupled_recreation: seed % 2 == 1,
        };
        let sg = random_graph(shape, 400 + seed);
        let base = spanners::min_storage(&sg).unwrap();
        let spt = spanners::spt(&sg).unwrap();
        let spt_report = evaluate(&spt, &sg, None).unwrap();
        let plan = heuristics::lmg(&sg, &base, &spt, spt_report.total_storage, None).unwrap();
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(
            report.sum_recreation, spt_report.sum_recreation,
            "seed {seed}"
        );
        assert!(report.total_storage <= spt_report.total_storage);
    }
}

#[test]
fn storage_minimizing_greedy_lands_in_oracle_bracket() {
    for seed in 0..15u64 {
        let shape = InstanceShape {
            n: 7,
            directed: true,
            density: 0.7,
            decoupled_recreation: false,
        };
        let sg = random_graph(shape, 500 + seed);
        let base = spanners::min_storage(&sg).unwrap();
        let spt = spanners::spt(&sg).unwrap();
        let spt_report = evaluate(&spt, &sg, None).unwrap();
        let theta = spt_report.sum_recreation + spt_report.sum_recreation / 10;
        let plan = heuristics::lmg_min_storage(&sg, &base, &spt, theta, None).unwrap();
        let report = evaluate(&plan, &sg, None).unwrap();
        assert!(report.sum_recreation <= theta, "seed {seed}");

        let obj = Objective::with_constraint(
            ObjectiveKind::MinStorage,
            ConstraintKind::SumRecreation,
            theta,
        )
        .unwrap();
        let (_, optimum) = enumerate_optimal(&sg, obj).unwrap();
        assert!(optimum <= report.total_storage, "seed {seed}");
        assert!(
            report.total_storage <= spt_report.total_storage,
            "seed {seed}"
        );
    }
}

#[test]
fn threshold_prim_budget_dual_tracks_shortest_paths() {
    for seed in 0..20u64 {
        let shape = InstanceShape {
            n: 7,
            directed: true,
            density: 0.8,
            decoupled_recreation: false,
        };
        let sg = random_graph(shape, 600 + seed);
        let spt = spanners::spt(&sg).unwrap();
        let spt_report = evaluate(&spt, &sg, None).unwrap();
        // With the shortest path tree affordable, its max recreation is
        // reached exactly.
        let plan = heuristics::mp_budget(&sg, spt_report.total_storage).unwrap();
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(
            report.max_recreation, spt_report.max_recreation,
            "seed {seed}"
        );
        assert!(report.total_storage <= spt_report.total_storage);
    }
}

#[test]
fn threshold_prim_budget_dual_is_monotone_over_budgets() {
    for seed in 0..12u64 {
        let shape = InstanceShape {
            n: 7,
            directed: true,
            density: 0.8,
            decoupled_recreation: false,
        };
        let sg = random_graph(shape, 700 + seed);
        let mca = spanners::min_storage(&sg).unwrap();
        let lo = evaluate(&mca, &sg, None).unwrap().total_storage;
        let spt = spanners::spt(&sg).unwrap();
        let hi = evaluate(&spt, &sg, None).unwrap().total_storage;
        let mut previous = u64::MAX;
        for step in 0..5u64 {
            let budget = lo + (hi - lo) * step / 4;
            let Ok(plan) = heuristics::mp_budget(&sg, budget) else {
                continue;
            };
            let report = evaluate(&plan, &sg, None).unwrap();
            assert!(report.total_storage <= budget, "seed {seed} step {step}");
            assert!(
                report.max_recreation <= previous,
                "seed {seed} step {step}: {} then {}",
                previous,
                report.max_recreation
            );
            previous = report.max_recreation;
        }
    }
}

#[test]
fn window_heuristic_never_beats_min_storage_on_same_edges() {
    for seed in 0..20u64 {
        let shape = InstanceShape {
            n: 9,
            directed: true,
            density: 0.5,
            decoupled_recreation: false,
        };
        let matrices = common::random_matrices(shape, 800 + seed);
        let sg = verstore::solver_graph_from_matrices(&matrices).unwrap();
        let versions: Vec<heuristics::GithVersion> = (1..=9)
            .map(|id| heuristics::GithVersion {
                id,
                size: matrices.get(id, id).unwrap().storage,
                name: None,
            })
            .collect();
        let config = heuristics::GitHConfig {
            window: usize::MAX,
            max_depth: 50,
            ordering: heuristics::GitHOrdering::SizeDesc,
        };
        let mut source: &verstore::CostMatrices = &matrices;
        let (plan, depths) = heuristics::gith(&versions, &mut source, &config).unwrap();
        assert!(
            verstore::validate_plan(&plan, &sg).is_empty(),
            "seed {seed}"
        );
        assert!(depths.iter().all(|&d| d <= 50));
        let cost = evaluate(&plan, &sg, None).unwrap().total_storage;
        let mca = spanners::min_storage(&sg).unwrap();
        let floor = evaluate(&mca, &sg, None).unwrap().total_storage;
        assert!(cost >= floor, "seed {seed}");
    }
}

#[test]
fn heuristics_never_beat_the_enumeration_oracle() {
    for seed in 0..15u64 {
        let shape = InstanceShape {
            n: 7,
            directed: true,
            density: 0.8,
            decoupled_recreation: seed % 2 == 0,
        };
        let sg = random_graph(shape, 900 + seed);
        let base = spanners::min_storage(&sg).unwrap();
        let base_report = evaluate(&base, &sg, None).unwrap();
        let spt = spanners::spt(&sg).unwrap();

        // Budgeted greedy vs the optimal recreation sum under the budget.
        let budget = base_report.total_storage + base_report.total_storage / 4;
        let plan = heuristics::lmg(&sg, &base, &spt, budget, None).unwrap();
        let sum = evaluate(&plan, &sg, None).unwrap().sum_recreation;
        let obj = Objective::with_constraint(
            ObjectiveKind::MinSumRecreation,
            ConstraintKind::StorageBudget,
            budget,
        )
        .unwrap();
        let (_, optimum) = enumerate_optimal(&sg, obj).unwrap();
        assert!(sum >= optimum, "seed {seed}: greedy beat the oracle");

        // Balance heuristic vs the unconstrained storage optimum.
        let (_, dist) = spanners::spt_with_distances(&sg).unwrap();
        let balanced =
            heuristics::last(&sg, &base, &dist, heuristics::Stretch::new(2, 1).unwrap()).unwrap();
        let cost = evaluate(&balanced, &sg, None).unwrap().total_storage;
        let (_, floor) = enumerate_optimal(&sg, Objective::new(ObjectiveKind::MinStorage)).unwrap();
        assert!(cost >= floor, "seed {seed}: balance beat the storage floor");
    }
}

#[test]
fn khop_entry_count_matches_independent_bfs() {
    use verstore::delta::{populate_matrices, DeltaMode, DeltaPolicy};
    use verstore::genlab::{self, DatasetParams, GenParams};

    let params = GenParams {
        num_commits: 60,
        branch_interval: 4,
        branch_probability: 0.8,
        branch_limit: 3,
        branch_length: 3,
        seed: 31,
    };
    let dataset = DatasetParams {
        root_rows: 30,
        root_cols: 3,
        edits_per_commit: (1, 2),
        rows_per_edit: (1, 3),
        column_restructure_share: 0,
    };
    let skeleton = genlab::gen_version_graph(&params, &dataset).unwrap();
    let corpus = genlab::gen_datasets(&skeleton, params.seed);
    let graph = genlab::skeleton_version_graph(&skeleton, &corpus).unwrap();
    let matrices =
        populate_matrices(&corpus, &graph, DeltaPolicy::KHop(10), DeltaMode::Directed).unwrap();

    // Independent BFS over the undirected derivation edges.
    let mut adj = vec![Vec::new(); 61];
    for &(u, v) in graph.derivation_edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut expected = 60; // diagonals
    for start in 1..=60usize {
        let mut dist = vec![usize::MAX; 61];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == 10 {
                continue;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        expected += (start + 1..=60).filter(|&v| dist[v] != usize::MAX).count();
    }
    assert_eq!(matrices.len(), expected);
}
