//! Synthetic graph and lexicon generator.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use adaptive_core::seed::seeded_rng;
use adaptive_core::{
    Category, EntryKind, Feature, FeatureGraph, GraphDocument, Lexicon, LexiconDocument,
    LexiconEntry,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// f0 -> f1 -> ... -> f(n-1)
    Chain,
    /// One root, n-2 parallel middles, one sink.
    Diamond,
    /// n-1 roots, all prerequisites of one sink.
    Wide,
    /// Every forward pair of a fixed order is an edge with probability 1/2.
    Random,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Chain => "chain",
            Shape::Diamond => "diamond",
            Shape::Wide => "wide",
            Shape::Random => "random",
        })
    }
}

impl FromStr for Shape {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Shape::Chain),
            "diamond" => Ok(Shape::Diamond),
            "wide" => Ok(Shape::Wide),
            "random" => Ok(Shape::Random),
            other => Err(SimError::InvalidShapeParameters(format!("unknown shape `{other}`"))),
        }
    }
}

/// Feature id for index `i` in a graph of `n` features; zero-padded so that
/// id order equals index order.
pub fn feature_id(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len().max(2);
    format!("f{i:0width$}")
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// Generates a graph of `n_features` in the given shape and a lexicon giving
/// every feature at least `entries_per_feature` entries. Difficulty ranks
/// follow the construction order, which is also a topological order.
pub fn generate_fixture(
    n_features: usize,
    shape: Shape,
    entries_per_feature: usize,
    seed: u64,
) -> Result<(GraphDocument, LexiconDocument), SimError> {
    let min = match shape {
        Shape::Chain | Shape::Random => 1,
        Shape::Wide => 2,
        Shape::Diamond => 3,
    };
    if n_features < min {
        return Err(SimError::InvalidShapeParameters(format!(
            "{shape} needs at least {min} features, got {n_features}"
        )));
    }
    if entries_per_feature == 0 {
        return Err(SimError::InvalidShapeParameters("entries_per_feature must be at least 1".into()));
    }

    let n = n_features;
    let id = |i: usize| feature_id(i, n);
    let mut rng = seeded_rng(&[seed.into(), "fixture".into(), shape.to_string().as_str().into()]);

    let features = (0..n)
        .map(|i| Feature {
            id: id(i),
            label: format!("feature {i}"),
            category: if i % 2 == 0 { Category::Phonological } else { Category::Syntactic },
            difficulty_rank: i as u32,
            min_age_level: 1,
        })
        .collect();

    let pairs: Vec<(usize, usize)> = match shape {
        Shape::Chain => (1..n).map(|i| (i - 1, i)).collect(),
        Shape::Diamond => (1..n - 1).flat_map(|m| [(0, m), (m, n - 1)]).collect(),
        Shape::Wide => (0..n - 1).map(|r| (r, n - 1)).collect(),
        Shape::Random => {
            let mut pairs = Vec::new();
            for j in 1..n {
                for i in 0..j {
                    if rng.random_bool(0.5) {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        }
    };
    let graph = GraphDocument {
        graph_id: format!("{shape}-{n}-{seed}"),
        features,
        edges: pairs.into_iter().map(|(a, b)| (id(a), id(b))).collect(),
    };

    let mut entries = Vec::with_capacity(n * entries_per_feature);
    for i in 0..n {
        for j in 0..entries_per_feature {
            let mut feature_ids: BTreeSet<String> = [id(i)].into();
            if n > 1 && rng.random_bool(0.2) {
                feature_ids.insert(id(rng.random_range(0..n)));
            }
            let sentence = j % 5 == 4;
            let words = if sentence { rng.random_range(3..6) } else { 1 };
            let text = (0..words)
                .map(|_| {
                    let len = rng.random_range(3..9);
                    (0..len)
                        .map(|_| LETTERS[rng.random_range(0..LETTERS.len())] as char)
                        .collect::<String>()
                })
                .collect::<Vec<_>>()
                .join(" ");
            entries.push(LexiconEntry {
                entry_id: format!("e{}-{j:03}", id(i)),
                text,
                kind: if sentence { EntryKind::Sentence } else { EntryKind::Word },
                feature_ids,
            });
        }
    }
    let lexicon = LexiconDocument {
        lexicon_id: format!("{}-lexicon", graph.graph_id),
        entries,
    };
    Ok((graph, lexicon))
}

/// Validates generated documents through the regular loaders.
pub fn load_fixture(
    graph: &GraphDocument,
    lexicon: &LexiconDocument,
) -> Result<(FeatureGraph, Lexicon), SimError> {
    let graph = FeatureGraph::from_document(graph.clone())?;
    let lexicon = Lexicon::from_document(lexicon.clone(), &graph)?;
    Ok((graph, lexicon))
}

/// Pretty JSON with a trailing newline, as written to disk.
pub fn to_pretty_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("documents always serialize");
    bytes.push(b'\n');
    bytes
}
