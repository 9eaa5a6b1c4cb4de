use proptest::prelude::*;

use hetrank::clustering::{dag_clustering, find, ClusteringConfig, FindConfig, FindOutcome, Side};
use hetrank::gadget::quadratic_residue_gadget;
use hetrank::model::{generate_planted, Layout, PlantedSpec};
use hetrank::{Tournament, VertexSet};

fn planted(sizes: &[usize], p: f64, cross: f64, seed: u64) -> (Tournament, PlantedSpec) {
    let spec = PlantedSpec::uniform(sizes, p, cross, Layout::Shuffled { seed }).unwrap();
    let (t, _) = generate_planted(&spec, seed).unwrap();
    (t, spec)
}

/// Re-checks a find outcome against its definition by direct counting.
fn check_outcome(t: &Tournament, gadget: &Tournament, alive: &VertexSet, c: f64, outcome: &FindOutcome) {
    match outcome {
        FindOutcome::Copy { vertices, gadget_order } => {
            assert_eq!(vertices.len(), gadget.n());
            let mut seen = VertexSet::empty(t.n());
            for &v in vertices {
                assert!(alive.contains(v) && seen.insert(v));
            }
            for a in 0..vertices.len() {
                for b in 0..vertices.len() {
                    if a != b && gadget.beats(gadget_order[a], gadget_order[b]) {
                        assert!(t.beats(vertices[a], vertices[b]), "copy edge {a} -> {b} missing");
                    }
                }
            }
        }
        FindOutcome::Pair { x, y, side, .. } => {
            assert!(!x.is_empty() && !y.is_empty() && x.is_disjoint(y));
            assert!(x.is_subset(alive) && y.is_subset(alive));
            for v in x {
                let d = match side {
                    Side::Out => t.out_degree_in(v, y),
                    Side::In => t.in_degree_in(v, y),
                };
                assert!((d as f64) < c * y.len() as f64, "degree {d} of {v} vs {}", c * y.len() as f64);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn find_outcomes_satisfy_their_definitions(seed in any::<u64>(), p in 0.0f64..0.2, cross in 0.3f64..0.7, sample in prop::sample::select(vec![0usize, 4, 16])) {
        let (t, _) = planted(&[40, 30], p, cross, seed);
        let g = quadratic_residue_gadget(7).unwrap();
        let mut alive = VertexSet::full(t.n());
        for v in 0..(seed % 10) as usize {
            alive.remove(v);
        }
        let cfg = FindConfig { sample_size: sample, ..FindConfig::new(0.15, 0.3, 7) };
        let report = find(&g, &t, &alive, &cfg, 0, seed).unwrap();
        check_outcome(&t, &g.tournament, &alive, cfg.c, &report.outcome);
    }
}

#[test]
fn clustering_is_a_partition_and_makes_progress() {
    for seed in 0..6 {
        let (t, spec) = planted(&[60, 50, 40], 0.05, 0.5, seed);
        let g = quadratic_residue_gadget(7).unwrap();
        for cfg in [
            ClusteringConfig::new(0.2, &spec.bounds, &g),
            ClusteringConfig::strict(0.2, &spec.bounds, &g),
        ] {
            let (p, stats) = dag_clustering(&t, &spec.bounds, 0.2, &g, &cfg, seed).unwrap();
            let n = t.n();
            let mut seen = VertexSet::empty(n);
            for v in p.clusters.iter().flatten().chain(&p.remainder) {
                assert!(seen.insert(*v), "vertex {v} appears twice");
            }
            assert_eq!(seen.len(), n);
            assert!(p.remainder.len() as f64 <= 0.2 * n as f64 + 1.0 || stats.find_runs >= cfg.max_find_runs);
            // every run deleted a copy or was a pair; accepted pairs moved >= 2 vertices
            assert_eq!(stats.find_runs, stats.copies_found + stats.pairs_found);
            assert!(stats.deleted_pairs >= stats.copies_found);
            assert!(stats.chunks.iter().all(|c| c.vertices.len() >= 2));
            // replaying the chunk log reproduces the clusters
            assert_eq!(stats.clusters_after(n, usize::MAX).clusters, p.clusters);
        }
    }
}

#[test]
fn chunk_log_only_grows_clusters() {
    let (t, spec) = planted(&[80, 80], 0.02, 0.5, 1);
    let g = quadratic_residue_gadget(7).unwrap();
    let cfg = ClusteringConfig::new(0.15, &spec.bounds, &g);
    let (_, stats) = dag_clustering(&t, &spec.bounds, 0.15, &g, &cfg, 1).unwrap();
    let mut last = 0;
    for budget in [0, 10, 100, 1000, usize::MAX] {
        let covered = stats.clusters_after(t.n(), budget).clustered();
        assert!(covered >= last);
        last = covered;
    }
}

#[test]
fn clustering_is_seeded() {
    let (t, spec) = planted(&[50, 50], 0.02, 0.5, 3);
    let g = quadratic_residue_gadget(7).unwrap();
    let cfg = ClusteringConfig::new(0.15, &spec.bounds, &g);
    let a = dag_clustering(&t, &spec.bounds, 0.15, &g, &cfg, 9).unwrap();
    let b = dag_clustering(&t, &spec.bounds, 0.15, &g, &cfg, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn random_tournaments_contain_the_gadget() {
    let g = quadratic_residue_gadget(7).unwrap();
    let n = 2000;
    let alive = VertexSet::full(n);
    let cfg = FindConfig { sample_size: 0, ..FindConfig::new(0.1, 0.5, 7) };
    let copies = (0..10u64)
        .filter(|&s| {
            let t = Tournament::from_fn(n, |u, v| hetrank::seed::derive(s, (u * n + v) as u64) & 1 == 1);
            let report = find(&g, &t, &alive, &cfg, 0, s).unwrap();
            check_outcome(&t, &g.tournament, &alive, cfg.c, &report.outcome);
            matches!(report.outcome, FindOutcome::Copy { .. })
        })
        .count();
    assert!(copies >= 9, "{copies}/10 copies");
}
