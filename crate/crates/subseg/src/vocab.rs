//! String-to-id maps for words, POS tags and dependency labels.
//!
//! Ids 0 and 1 are reserved for padding and unknowns in every table. Id
//! assignment follows first occurrence in the training corpus, so the same
//! input always yields the same table.

use std::collections::HashMap;

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

/// One string table: id 0 = PAD, id 1 = UNK, real entries from 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringTable {
    entries: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl StringTable {
    pub fn new() -> Self {
        let mut table = StringTable {
            entries: Vec::new(),
            index: HashMap::new(),
        };
        table.insert(PAD_TOKEN);
        table.insert(UNK_TOKEN);
        table
    }

    /// Rebuilds from a raw entry list (checkpoint load path). The first two
    /// entries must be the reserved PAD/UNK markers.
    pub fn from_entries(entries: Vec<String>) -> crate::Result<Self> {
        if entries.len() < 2 || entries[0] != PAD_TOKEN || entries[1] != UNK_TOKEN {
            return Err(crate::Error::invalid(
                "string table must start with the reserved <pad>/<unk> entries",
            ));
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Ok(StringTable { entries, index })
    }

    /// Adds `s` if absent; returns its id either way.
    pub fn insert(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.index.get(s) {
            return id;
        }
        let id = self.entries.len() as u32;
        self.entries.push(s.to_string());
        self.index.insert(s.to_string(), id);
        id
    }

    /// Id for `s`, falling back to UNK.
    pub fn id(&self, s: &str) -> u32 {
        self.index.get(s).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, s: &str) -> bool {
        self.index.contains_key(s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}

impl Default for StringTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Word, POS and dependency-label tables for one trained model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub words: StringTable,
    pub pos: StringTable,
    pub deps: StringTable,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary {
            words: StringTable::new(),
            pos: StringTable::new(),
            deps: StringTable::new(),
        }
    }

    pub fn sizes(&self) -> VocabSizes {
        VocabSizes {
            words: self.words.len(),
            pos: self.pos.len(),
            deps: self.deps.len(),
        }
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabSizes {
    pub words: usize,
    pub pos: usize,
    pub deps: usize,
}
