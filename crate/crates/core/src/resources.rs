//! Feature-annotated lexicon: the words and sentences games are built from.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeatureGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Word,
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconEntry {
    pub entry_id: String,
    pub text: String,
    pub kind: EntryKind,
    /// Features this entry exercises.
    pub feature_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconDocument {
    pub lexicon_id: String,
    pub entries: Vec<LexiconEntry>,
}

/// Validated lexicon plus its feature → entries index.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    lexicon_id: String,
    entries: BTreeMap<String, LexiconEntry>,
    declared: Vec<String>,
    index: BTreeMap<String, BTreeSet<String>>,
}

/// Parses a lexicon document and resolves its feature tags against `graph`.
pub fn load_lexicon(source: &[u8], graph: &FeatureGraph) -> Result<Lexicon> {
    let document: LexiconDocument =
        serde_json::from_slice(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    Lexicon::from_document(document, graph)
}

impl Lexicon {
    pub fn from_document(document: LexiconDocument, graph: &FeatureGraph) -> Result<Self> {
        if document.lexicon_id.is_empty() {
            return Err(Error::MalformedDocument("lexicon_id must be non-empty".into()));
        }
        let mut entries = BTreeMap::new();
        let mut declared = Vec::with_capacity(document.entries.len());
        for entry in document.entries {
            if entry.entry_id.is_empty() {
                return Err(Error::MalformedDocument("entry_id must be non-empty".into()));
            }
            if entry.text.is_empty() {
                return Err(Error::MalformedDocument(format!(
                    "entry `{}` has empty text",
                    entry.entry_id
                )));
            }
            if entry.feature_ids.is_empty() {
                return Err(Error::MalformedDocument(format!(
                    "entry `{}` exercises no feature",
                    entry.entry_id
                )));
            }
            if let Some(missing) = entry.feature_ids.iter().find(|f| !graph.contains(f)) {
                return Err(Error::UnknownFeatureReference {
                    entry_id: entry.entry_id.clone(),
                    feature_id: missing.clone(),
                });
            }
            if entries.contains_key(&entry.entry_id) {
                return Err(Error::DuplicateEntryId(entry.entry_id));
            }
            declared.push(entry.entry_id.clone());
            entries.insert(entry.entry_id.clone(), entry);
        }
        let index = build_index(entries.values());
        Ok(Lexicon {
            lexicon_id: document.lexicon_id,
            entries,
            declared,
            index,
        })
    }

    pub fn to_document(&self) -> LexiconDocument {
        LexiconDocument {
            lexicon_id: self.lexicon_id.clone(),
            entries: self.declared.iter().map(|id| self.entries[id].clone()).collect(),
        }
    }

    pub fn lexicon_id(&self) -> &str {
        &self.lexicon_id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, entry_id: &str) -> Option<&LexiconEntry> {
        self.entries.get(entry_id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.index
    }

    /// Entry ids tagged with `feature_id`; empty for unknown or untagged features.
    pub fn entries_for_feature(&self, feature_id: &str) -> BTreeSet<String> {
        self.index.get(feature_id).cloned().unwrap_or_default()
    }

    pub(crate) fn matching(&self, feature_id: &str) -> impl Iterator<Item = &LexiconEntry> {
        self.index
            .get(feature_id)
            .into_iter()
            .flatten()
            .map(|id| &self.entries[id])
    }
}

/// Inverts entry annotations into feature → entry ids.
pub fn build_index<'a>(
    entries: impl IntoIterator<Item = &'a LexiconEntry>,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for entry in entries {
        for feature in &entry.feature_ids {
            index.entry(feature.clone()).or_default().insert(entry.entry_id.clone());
        }
    }
    index
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{build, feature};

    fn graph() -> FeatureGraph {
        build(vec![feature("a", 0, 1), feature("b", 1, 1), feature("c", 2, 1)], &[("a", "b")]).unwrap()
    }

    const DOC: &[u8] = br#"{
        "lexicon_id": "lx",
        "entries": [
            {"entry_id": "e1", "text": "cat", "kind": "word", "feature_ids": ["a"]},
            {"entry_id": "e2", "text": "the cat sat", "kind": "sentence", "feature_ids": ["a", "b"]}
        ]
    }"#;

    fn ids(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn builds_inverted_index() {
        let lx = load_lexicon(DOC, &graph()).unwrap();
        assert_eq!(lx.entries_for_feature("a"), ids(&["e1", "e2"]));
        assert_eq!(lx.entries_for_feature("b"), ids(&["e2"]));
        assert!(lx.entries_for_feature("c").is_empty());
        assert!(lx.entries_for_feature("zzz").is_empty());
        assert_eq!(&build_index(lx.entries()), lx.index());
    }

    #[test]
    fn reload_is_identical() {
        let g = graph();
        assert_eq!(load_lexicon(DOC, &g).unwrap(), load_lexicon(DOC, &g).unwrap());
    }

    #[test]
    fn dangling_tag_names_entry_and_feature() {
        let doc = br#"{"lexicon_id": "lx", "entries": [
            {"entry_id": "e9", "text": "zebra", "kind": "word", "feature_ids": ["z"]}]}"#;
        assert_eq!(
            load_lexicon(doc, &graph()).unwrap_err(),
            Error::UnknownFeatureReference { entry_id: "e9".into(), feature_id: "z".into() }
        );
    }

    #[test]
    fn empty_lexicon_is_valid() {
        let lx = load_lexicon(br#"{"lexicon_id": "lx", "entries": []}"#, &graph()).unwrap();
        assert!(lx.is_empty());
        assert!(lx.index().is_empty());
    }

    #[test]
    fn rejects_duplicates_and_bad_entries() {
        let g = graph();
        let dup = br#"{"lexicon_id": "lx", "entries": [
            {"entry_id": "e", "text": "a", "kind": "word", "feature_ids": ["a"]},
            {"entry_id": "e", "text": "b", "kind": "word", "feature_ids": ["a"]}]}"#;
        assert_eq!(load_lexicon(dup, &g).unwrap_err(), Error::DuplicateEntryId("e".into()));
        let untagged = br#"{"lexicon_id": "lx", "entries": [
            {"entry_id": "e", "text": "a", "kind": "word", "feature_ids": []}]}"#;
        assert!(matches!(load_lexicon(untagged, &g), Err(Error::MalformedDocument(_))));
        let extra = br#"{"lexicon_id": "lx", "entries": [
            {"entry_id": "e", "text": "a", "kind": "word", "feature_ids": ["a"], "pos": [0]}]}"#;
        assert!(matches!(load_lexicon(extra, &g), Err(Error::MalformedDocument(_))));
    }
}
