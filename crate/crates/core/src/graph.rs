//! The feature graph: language features and the prerequisite edges that
//! sequence their teaching.
//!
//! Edges point from prerequisite to dependent. Any acyclic graph is accepted,
//! so a feature may have several prerequisites.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Phonological,
    Syntactic,
}

/// A single language feature (a letter, phoneme, phoneme sequence, or
/// syntactic pattern).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Feature {
    pub id: String,
    pub label: String,
    pub category: Category,
    /// Position in the teaching sequence; lower is taught earlier. Ties allowed.
    pub difficulty_rank: u32,
    /// School year in which the feature is first taught.
    pub min_age_level: u32,
}

/// On-disk form of a graph, exactly as authored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub graph_id: String,
    pub features: Vec<Feature>,
    pub edges: Vec<(String, String)>,
}

/// A validated, immutable feature graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGraph {
    graph_id: String,
    features: BTreeMap<String, Feature>,
    /// Declaration order, kept so the graph serializes back as authored.
    declared: Vec<String>,
    edges: Vec<(String, String)>,
    /// Direct prerequisites per feature, sorted by (difficulty_rank, id).
    prerequisites: BTreeMap<String, Vec<String>>,
    /// Direct dependents per feature, sorted by (difficulty_rank, id).
    dependents: BTreeMap<String, Vec<String>>,
}

/// Parses and validates a graph document.
pub fn load_graph(source: &[u8]) -> Result<FeatureGraph> {
    let document: GraphDocument =
        serde_json::from_slice(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    FeatureGraph::from_document(document)
}

impl FeatureGraph {
    pub fn from_document(document: GraphDocument) -> Result<Self> {
        if document.graph_id.is_empty() {
            return Err(Error::MalformedDocument("graph_id must be non-empty".into()));
        }

        let mut features = BTreeMap::new();
        let mut declared = Vec::with_capacity(document.features.len());
        for feature in document.features {
            if feature.id.is_empty() {
                return Err(Error::MalformedDocument("feature id must be non-empty".into()));
            }
            if features.contains_key(&feature.id) {
                return Err(Error::DuplicateFeatureId(feature.id));
            }
            declared.push(feature.id.clone());
            features.insert(feature.id.clone(), feature);
        }

        let mut seen = HashSet::new();
        let mut prerequisites: BTreeMap<String, Vec<String>> =
            features.keys().map(|id| (id.clone(), Vec::new())).collect();
        let mut dependents = prerequisites.clone();
        for (prerequisite, dependent) in &document.edges {
            for end in [prerequisite, dependent] {
                if !features.contains_key(end) {
                    return Err(Error::UnknownFeatureInEdge {
                        prerequisite: prerequisite.clone(),
                        dependent: dependent.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if prerequisite == dependent {
                return Err(Error::CycleDetected(vec![prerequisite.clone(), dependent.clone()]));
            }
            if !seen.insert((prerequisite.clone(), dependent.clone())) {
                return Err(Error::DuplicateEdge(prerequisite.clone(), dependent.clone()));
            }
            prerequisites.get_mut(dependent).unwrap().push(prerequisite.clone());
            dependents.get_mut(prerequisite).unwrap().push(dependent.clone());
        }

        let key = |id: &String| (features[id].difficulty_rank, id.clone());
        for list in prerequisites.values_mut().chain(dependents.values_mut()) {
            list.sort_by_key(key);
        }

        let graph = FeatureGraph {
            graph_id: document.graph_id,
            features,
            declared,
            edges: document.edges,
            prerequisites,
            dependents,
        };
        if let Some(cycle) = graph.find_cycle() {
            return Err(Error::CycleDetected(cycle));
        }
        Ok(graph)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            graph_id: self.graph_id.clone(),
            features: self.declared.iter().map(|id| self.features[id].clone()).collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn graph_id(&self) -> &str {
        &self.graph_id
    }

    pub fn feature(&self, id: &str) -> Option<&Feature> {
        self.features.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.features.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Features in id order.
    pub fn features(&self) -> impl Iterator<Item = &Feature> {
        self.features.values()
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    /// Ordering key used for every deterministic tie-break.
    pub fn rank_key(&self, id: &str) -> (u32, String) {
        let rank = self.features.get(id).map_or(u32::MAX, |f| f.difficulty_rank);
        (rank, id.to_owned())
    }

    /// Immediate prerequisites of `id`, sorted by (difficulty_rank, id).
    pub fn direct_prerequisites(&self, id: &str) -> Result<&[String]> {
        self.prerequisites
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownFeature(id.to_owned()))
    }

    pub fn direct_dependents(&self, id: &str) -> Result<&[String]> {
        self.dependents
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownFeature(id.to_owned()))
    }

    /// Direct or transitive prerequisites of `id`, sorted by (difficulty_rank, id).
    pub fn prerequisites_of(&self, id: &str, transitive: bool) -> Result<Vec<String>> {
        let direct = self.direct_prerequisites(id)?;
        if !transitive {
            return Ok(direct.to_vec());
        }
        let mut closure = BTreeSet::new();
        let mut stack: Vec<&String> = direct.iter().collect();
        while let Some(next) = stack.pop() {
            if closure.insert(next.clone()) {
                stack.extend(self.prerequisites[next].iter());
            }
        }
        let mut out: Vec<String> = closure.into_iter().collect();
        out.sort_by_key(|f| self.rank_key(f));
        Ok(out)
    }

    /// A topological order of every feature. Among features whose
    /// prerequisites are all placed, the lowest (difficulty_rank, id) goes first.
    pub fn teaching_order(&self) -> Vec<String> {
        let mut indegree: BTreeMap<&str, usize> = self
            .prerequisites
            .iter()
            .map(|(id, pre)| (id.as_str(), pre.len()))
            .collect();
        let mut ready: BinaryHeap<Reverse<(u32, &str)>> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| Reverse((self.features[id].difficulty_rank, id)))
            .collect();
        let mut order = Vec::with_capacity(self.features.len());
        while let Some(Reverse((_, id))) = ready.pop() {
            order.push(id.to_owned());
            for dependent in &self.dependents[id] {
                let d = indegree.get_mut(dependent.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse((
                        self.features[dependent].difficulty_rank,
                        dependent.as_str(),
                    )));
                }
            }
        }
        order
    }

    /// Returns one cycle as a closed path `[x, .., x]`, if any exists.
    fn find_cycle(&self) -> Option<Vec<String>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Unvisited,
            OnStack,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> =
            self.features.keys().map(|k| (k.as_str(), Mark::Unvisited)).collect();

        for root in self.features.keys() {
            if marks[root.as_str()] != Mark::Unvisited {
                continue;
            }
            // (node, index of next dependent to explore)
            let mut stack: Vec<(&str, usize)> = vec![(root.as_str(), 0)];
            marks.insert(root.as_str(), Mark::OnStack);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let outs = &self.dependents[node];
                if *next < outs.len() {
                    let child = outs[*next].as_str();
                    *next += 1;
                    match marks[child] {
                        Mark::Unvisited => {
                            marks.insert(child, Mark::OnStack);
                            stack.push((child, 0));
                        }
                        Mark::OnStack => {
                            let start = stack.iter().position(|(n, _)| *n == child).unwrap();
                            let mut cycle: Vec<String> =
                                stack[start..].iter().map(|(n, _)| (*n).to_owned()).collect();
                            cycle.push(child.to_owned());
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
        None
    }
}
