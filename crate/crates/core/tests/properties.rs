use std::collections::{BTreeMap, BTreeSet};

use adaptive_core::adaptation::{candidate_features, is_playable, plan_session, submit_result};
use adaptive_core::graph::load_graph;
use adaptive_core::mastery::{update_mastery, EmaConfig};
use adaptive_core::profile::{apply_unlocks, instantiate_profile};
use adaptive_core::{
    AdaptationConfig, Category, EntryKind, Feature, FeatureGraph, FeatureStatus, GraphDocument,
    ItemOutcome, Lexicon, LexiconDocument, LexiconEntry, MasteryScale, SessionResult,
    SessionScore,
};
use proptest::prelude::*;

/// Random DAG: node i may depend on any node j < i; ids are shuffled so
/// alphabetical order does not coincide with the construction order.
fn dag() -> impl Strategy<Value = GraphDocument> {
    (1usize..=20)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), pairs),
                proptest::collection::vec(0u32..4, n),
                proptest::collection::vec(0u32..4, n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, include, ranks, ages, names)| {
            let id = |i: usize| format!("f{:02}", names[i]);
            let features = (0..n)
                .map(|i| Feature {
                    id: id(i),
                    label: id(i),
                    category: if i % 2 == 0 { Category::Phonological } else { Category::Syntactic },
                    difficulty_rank: ranks[i],
                    min_age_level: ages[i],
                })
                .collect();
            let mut edges = Vec::new();
            let mut k = 0;
            for dependent in 0..n {
                for prerequisite in 0..dependent {
                    if include[k] {
                        edges.push((id(prerequisite), id(dependent)));
                    }
                    k += 1;
                }
            }
            GraphDocument { graph_id: "g".into(), features, edges }
        })
}

fn reachable_ancestors(doc: &GraphDocument, target: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![target.to_owned()];
    while let Some(node) = stack.pop() {
        for (p, d) in &doc.edges {
            if *d == node && seen.insert(p.clone()) {
                stack.push(p.clone());
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn teaching_order_is_a_topological_permutation(doc in dag()) {
        let graph = FeatureGraph::from_document(doc.clone()).unwrap();
        let order = graph.teaching_order();
        let pos: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        prop_assert_eq!(order.len(), doc.features.len());
        prop_assert_eq!(pos.len(), doc.features.len());
        for (u, v) in &doc.edges {
            prop_assert!(pos[u.as_str()] < pos[v.as_str()]);
        }
    }

    #[test]
    fn transitive_prerequisites_match_reachability(doc in dag()) {
        let graph = FeatureGraph::from_document(doc.clone()).unwrap();
        for f in &doc.features {
            let got: BTreeSet<String> = graph.prerequisites_of(&f.id, true).unwrap().into_iter().collect();
            prop_assert_eq!(got, reachable_ancestors(&doc, &f.id));
        }
    }

    #[test]
    fn loading_is_total(doc in dag(), extra in proptest::collection::vec((0usize..25, 0usize..25), 0..4)) {
        // Extra edges may dangle, duplicate, self-loop or close cycles.
        let mut doc = doc;
        for (a, b) in extra {
            doc.edges.push((format!("f{a:02}"), format!("f{b:02}")));
        }
        let bytes = serde_json::to_vec(&doc).unwrap();
        if let Ok(graph) = load_graph(&bytes) {
            prop_assert_eq!(graph.teaching_order().len(), graph.len());
            for (u, v) in graph.edges() {
                prop_assert!(graph.contains(u) && graph.contains(v) && u != v);
            }
        }
    }

    #[test]
    fn garbage_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = load_graph(&bytes);
    }

    #[test]
    fn unlocks_match_oracle(doc in dag(), masteries in proptest::collection::vec(0.0f64..=10.0, 20), locked in proptest::collection::vec(any::<bool>(), 20)) {
        let scale = MasteryScale::default();
        let graph = FeatureGraph::from_document(doc.clone()).unwrap();
        let mut profile = instantiate_profile(&graph, "s", 0, &scale).unwrap();
        for (i, state) in profile.states.values_mut().enumerate() {
            state.mastery = masteries[i];
            state.status = if locked[i] { FeatureStatus::Locked } else { FeatureStatus::Open };
        }
        let before = profile.clone();
        let expected: BTreeSet<String> = before.states.iter()
            .filter(|(_, s)| s.status == FeatureStatus::Locked)
            .filter(|(id, _)| doc.edges.iter().filter(|(_, d)| d == *id).all(|(p, _)| before.states[p].mastery >= 7.5))
            .map(|(id, _)| id.clone())
            .collect();
        let opened = apply_unlocks(&mut profile, &graph, &scale);
        prop_assert_eq!(opened.iter().cloned().collect::<BTreeSet<_>>(), expected);
        for (id, s) in &profile.states {
            let old = &before.states[id];
            if opened.contains(id) {
                prop_assert_eq!(s.status, FeatureStatus::Open);
                prop_assert_eq!(s.mastery, 5.0);
            } else {
                prop_assert_eq!(s, old);
            }
        }
        prop_assert!(apply_unlocks(&mut profile, &graph, &scale).is_empty());
    }

    #[test]
    fn update_stays_in_bounds_and_drop_is_clamped(prev in 0.0f64..=10.0, score in 0.0f64..=10.0, alpha in 0.01f64..=1.0) {
        let cfg = EmaConfig { alpha, ..Default::default() };
        let scale = MasteryScale::default();
        let s = SessionScore { value: score, had_errors: score < 10.0 };
        let next = update_mastery(prev, &s, &cfg, &scale);
        prop_assert!((0.0..=10.0).contains(&next));
        prop_assert!(prev - next <= 1.0 + 1e-9);
        if next < scale.max {
            prop_assert!(next - prev <= alpha * (10.0 - prev) + 1e-9);
        } else {
            prop_assert!(next - prev <= alpha * (10.0 - prev) + 0.5 + 1e-9);
        }
    }

    #[test]
    fn update_is_monotone_in_score(prev in 0.0f64..=10.0, a in 0.0f64..=10.0, b in 0.0f64..=10.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let cfg = EmaConfig::default();
        let scale = MasteryScale::default();
        let at = |v: f64| update_mastery(prev, &SessionScore { value: v, had_errors: v < 10.0 }, &cfg, &scale);
        prop_assert!(at(lo) <= at(hi));
    }

    #[test]
    fn planning_is_read_only_and_candidates_are_playable(doc in dag(), age in 0i64..5, plays in proptest::collection::vec((0usize..20, 0usize..8, 1usize..8), 0..40)) {
        let cfg = AdaptationConfig::default();
        let graph = FeatureGraph::from_document(doc.clone()).unwrap();
        let lexicon = lexicon_for(&graph, 2);
        let mut profile = instantiate_profile(&graph, "s", age, &cfg.scale).unwrap();
        let ids: Vec<String> = profile.states.keys().cloned().collect();
        for (pick, correct, total) in plays {
            let feature_id = ids[pick % ids.len()].clone();
            let items = (0..total).map(|i| ItemOutcome { correct: i < correct }).collect();
            let _ = submit_result(&mut profile, &graph, &SessionResult { feature_id, items }, &cfg);

            let eligible: BTreeSet<String> = profile.states.iter()
                .filter(|(_, s)| is_playable(s, profile.session_counter, &cfg))
                .map(|(id, _)| id.clone())
                .collect();
            match candidate_features(&profile, &graph, &cfg) {
                Ok(c) => {
                    let got: Vec<String> = c.into_iter().map(|c| c.feature_id).collect();
                    let set: BTreeSet<String> = got.iter().cloned().collect();
                    prop_assert_eq!(set.len(), got.len());
                    prop_assert_eq!(set, eligible);
                }
                Err(_) => prop_assert!(eligible.is_empty()),
            }
            let snapshot = profile.clone();
            let _ = plan_session(&profile, &graph, &lexicon, &cfg);
            prop_assert_eq!(&profile, &snapshot);
            for s in profile.states.values() {
                prop_assert!((0.0..=10.0).contains(&s.mastery));
            }
        }
    }

    #[test]
    fn index_lookup_matches_scan(n_entries in 0usize..300, tags in proptest::collection::vec(proptest::collection::btree_set(0usize..12, 1..4), 300)) {
        let features: Vec<Feature> = (0..12).map(|i| Feature {
            id: format!("f{i}"), label: String::new(), category: Category::Syntactic,
            difficulty_rank: i, min_age_level: 0,
        }).collect();
        let graph = FeatureGraph::from_document(GraphDocument { graph_id: "g".into(), features, edges: vec![] }).unwrap();
        let entries: Vec<LexiconEntry> = (0..n_entries).map(|i| LexiconEntry {
            entry_id: format!("e{i}"), text: format!("w{i}"), kind: EntryKind::Word,
            feature_ids: tags[i].iter().map(|t| format!("f{t}")).collect(),
        }).collect();
        let lexicon = Lexicon::from_document(LexiconDocument { lexicon_id: "lx".into(), entries: entries.clone() }, &graph).unwrap();
        for f in 0..13 {
            let id = format!("f{f}");
            let scan: BTreeSet<String> = entries.iter().filter(|e| e.feature_ids.contains(&id)).map(|e| e.entry_id.clone()).collect();
            prop_assert_eq!(lexicon.entries_for_feature(&id), scan);
        }
    }
}

fn lexicon_for(graph: &FeatureGraph, per_feature: usize) -> Lexicon {
    let entries = graph
        .features()
        .flat_map(|f| {
            (0..per_feature).map(move |i| LexiconEntry {
                entry_id: format!("{}-{i}", f.id),
                text: format!("{} {i}", f.label),
                kind: EntryKind::Word,
                feature_ids: [f.id.clone()].into(),
            })
        })
        .collect();
    Lexicon::from_document(LexiconDocument { lexicon_id: "lx".into(), entries }, graph).unwrap()
}

/// Sessions needed to reach the maximum from the opening value with perfect
/// play, by direct evaluation of the unconstrained recurrence 10 - m_k = (1-a)^k * 5
/// against the snap distance of 0.5.
fn perfect_sessions_closed_form(alpha: f64) -> usize {
    (1..).find(|&k| (1.0 - alpha).powi(k as i32) * 5.0 <= 0.5).unwrap()
}

#[test]
fn three_perfect_sessions_exactly_for_alpha_band() {
    let scale = MasteryScale::default();
    let perfect = SessionScore { value: 10.0, had_errors: false };
    for step in 1..=100 {
        let alpha = step as f64 / 100.0;
        let cfg = EmaConfig { alpha, ..Default::default() };
        let mut m = 5.0;
        let mut sessions = 0;
        while m < 10.0 {
            m = update_mastery(m, &perfect, &cfg, &scale);
            sessions += 1;
        }
        assert_eq!(sessions, perfect_sessions_closed_form(alpha), "alpha {alpha}");
        // (1 - a)^2 * 5 > 0.5 and (1 - a)^3 * 5 <= 0.5  <=>  a in [0.5358.., 0.6837..]
        let in_band = (1.0 - alpha).powi(2) * 5.0 > 0.5 && (1.0 - alpha).powi(3) * 5.0 <= 0.5;
        assert_eq!(sessions == 3, in_band, "alpha {alpha}");
    }
    assert_eq!(perfect_sessions_closed_form(0.6), 3);
    assert_eq!(perfect_sessions_closed_form(0.53), 4);
    assert_eq!(perfect_sessions_closed_form(0.69), 2);
}
