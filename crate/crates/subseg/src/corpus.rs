//! Boundary-labeled corpora from subtitle-style text.
//!
//! Subtitle documents carry two kinds of boundary evidence: sentence-final
//! punctuation and speaker-turn line breaks. This module turns both into
//! binary per-token boundary labels, chunks documents into passages, and
//! partitions documents into train/validation sets.
//!
//! Label convention: `labels[i] == 1` means a segment boundary falls after
//! token `i`. The last label of a passage is always 1 because passages are
//! cut on segment boundaries.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::token::AnnotatedToken;
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// Characters that terminate a segment, per the subtitle boundary convention.
pub const DEFAULT_BOUNDARY_CHARS: [char; 7] = ['(', ')', ':', '-', '!', '?', '.'];

/// Passages each document is divided into before training.
pub const DEFAULT_PASSAGES_PER_DOC: usize = 20;

/// Words rarer than this in the training split map to UNK.
pub const DEFAULT_MIN_WORD_FREQ: usize = 2;

/// One raw subtitle document: ordered lines, one per subtitle line / turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub lines: Vec<String>,
}

impl RawDocument {
    pub fn new(doc_id: impl Into<String>, lines: Vec<String>) -> Result<Self> {
        let doc_id = doc_id.into();
        if doc_id.is_empty() {
            return Err(Error::invalid("document id must be non-empty"));
        }
        if lines.is_empty() {
            return Err(Error::invalid(format!("document {doc_id} has no lines")));
        }
        Ok(RawDocument { doc_id, lines })
    }
}

/// A token sequence with one boundary label per token.
#[derive(Debug, Clone, PartialEq)]
pub struct Passage {
    pub doc_id: String,
    pub passage_index: usize,
    pub tokens: Vec<AnnotatedToken>,
    pub labels: Vec<u8>,
}

impl Passage {
    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// Recovers the segment structure by splitting after each label-1 token.
    pub fn segments(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        for (token, &label) in self.tokens.iter().zip(&self.labels) {
            current.push(token.surface.clone());
            if label == 1 {
                out.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
        out
    }

    pub fn boundary_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }
}

/// Document-level train/validation partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<Passage>,
    pub valid: Vec<Passage>,
    pub seed: u64,
}

/// Knobs for corpus construction. Defaults match the subtitle pipeline.
#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub boundary_chars: BTreeSet<char>,
    pub passages_per_doc: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            boundary_chars: DEFAULT_BOUNDARY_CHARS.into_iter().collect(),
            passages_per_doc: DEFAULT_PASSAGES_PER_DOC,
        }
    }
}

/// Splits a raw document into segments of clean, lowercased tokens.
///
/// Boundary characters and line breaks terminate segments. All other
/// punctuation is stripped from token surfaces (apostrophes stay, since they
/// are word-internal). Empty segments, e.g. from consecutive boundary
/// characters, are dropped.
pub fn extract_segments(doc: &RawDocument, boundary_chars: &BTreeSet<char>) -> Vec<Vec<String>> {
    let mut segments = Vec::new();
    for line in &doc.lines {
        let mut segment: Vec<String> = Vec::new();
        let mut token = String::new();
        let mut flush_token = |segment: &mut Vec<String>, token: &mut String| {
            if !token.is_empty() {
                segment.push(std::mem::take(token));
            }
        };
        for c in line.chars() {
            if boundary_chars.contains(&c) {
                flush_token(&mut segment, &mut token);
                if !segment.is_empty() {
                    segments.push(std::mem::take(&mut segment));
                }
            } else if c.is_whitespace() {
                flush_token(&mut segment, &mut token);
            } else if c.is_alphanumeric() || c == '\'' {
                token.extend(c.to_lowercase());
            }
            // anything else is non-boundary punctuation: drop it
        }
        flush_token(&mut segment, &mut token);
        // a speaker-turn line break terminates the segment too
        if !segment.is_empty() {
            segments.push(segment);
        }
    }
    segments
}

/// Concatenates segments into one token/label pair; the label is 1 exactly
/// at each segment's final token.
pub fn label_passage(segments: &[Vec<String>]) -> Result<(Vec<String>, Vec<u8>)> {
    if segments.is_empty() {
        return Err(Error::invalid("cannot label an empty segment list"));
    }
    let total: usize = segments.iter().map(Vec::len).sum();
    let mut tokens = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for segment in segments {
        if segment.is_empty() {
            return Err(Error::invalid("cannot label an empty segment"));
        }
        for token in segment {
            tokens.push(token.clone());
            labels.push(0);
        }
        *labels.last_mut().expect("segment is non-empty") = 1;
    }
    Ok((tokens, labels))
}

/// Greedy balanced partition of a document's segments into at most
/// `n_passages` passages, never splitting a segment.
///
/// A passage closes once it holds at least `total_tokens / n_passages`
/// tokens, or earlier when every remaining passage would otherwise go
/// empty. Yields exactly `min(n_passages, #segments)` passages whose
/// concatenation reproduces the input.
pub fn split_passages(
    doc_id: &str,
    doc_segments: &[Vec<String>],
    n_passages: usize,
) -> Result<Vec<Passage>> {
    if doc_segments.is_empty() {
        return Err(Error::invalid(format!(
            "document {doc_id} has no segments to split"
        )));
    }
    if n_passages == 0 {
        return Err(Error::invalid("n_passages must be at least 1"));
    }
    let total_tokens: usize = doc_segments.iter().map(Vec::len).sum();
    let target = total_tokens as f64 / n_passages as f64;
    let n_out = n_passages.min(doc_segments.len());

    let mut passages: Vec<Vec<Vec<String>>> = Vec::with_capacity(n_out);
    let mut current: Vec<Vec<String>> = Vec::new();
    let mut current_tokens = 0usize;
    for (i, segment) in doc_segments.iter().enumerate() {
        current_tokens += segment.len();
        current.push(segment.clone());
        let remaining_segments = doc_segments.len() - i - 1;
        let remaining_passages = n_out - passages.len() - 1;
        let reached_target = current_tokens as f64 >= target;
        // close early when later passages would run out of segments
        let must_close = remaining_segments == remaining_passages;
        if remaining_passages > 0 && (reached_target || must_close) {
            passages.push(std::mem::take(&mut current));
            current_tokens = 0;
        }
    }
    if !current.is_empty() {
        passages.push(current);
    }
    debug_assert_eq!(passages.len(), n_out);

    passages
        .iter()
        .enumerate()
        .map(|(idx, segments)| {
            let (tokens, labels) = label_passage(segments)?;
            Ok(Passage {
                doc_id: doc_id.to_string(),
                passage_index: idx,
                tokens: tokens.into_iter().map(AnnotatedToken::word).collect(),
                labels,
            })
        })
        .collect()
}

/// Runs the full corpus pipeline over raw documents and partitions them at
/// document level: deterministic shuffle under `seed`, first
/// `round(ratio * N)` documents to train (clamped so neither side is empty).
pub fn split_train_valid(
    docs: &[RawDocument],
    ratio: f64,
    seed: u64,
    options: &CorpusOptions,
) -> Result<CorpusSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!(
            "train ratio must be in (0,1), got {ratio}"
        )));
    }
    if docs.len() < 2 {
        return Err(Error::invalid(
            "need at least 2 documents for a train/valid split",
        ));
    }

    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n_train = ((ratio * docs.len() as f64).round() as usize).clamp(1, docs.len() - 1);

    let mut split = CorpusSplit {
        train: Vec::new(),
        valid: Vec::new(),
        seed,
    };
    for (rank, &doc_idx) in order.iter().enumerate() {
        let doc = &docs[doc_idx];
        let segments = extract_segments(doc, &options.boundary_chars);
        if segments.is_empty() {
            log::warn!("document {} produced no segments; skipped", doc.doc_id);
            continue;
        }
        let passages = split_passages(&doc.doc_id, &segments, options.passages_per_doc)?;
        if rank < n_train {
            split.train.extend(passages);
        } else {
            split.valid.extend(passages);
        }
    }
    if split.train.is_empty() {
        return Err(Error::invalid("train split is empty after extraction"));
    }
    Ok(split)
}

/// Builds the word/POS/dep tables from training passages. Words need corpus
/// frequency >= `min_freq`; POS and dep tables keep everything they see.
pub fn build_vocab(train: &[Passage], min_freq: usize) -> Result<Vocabulary> {
    if train.is_empty() {
        return Err(Error::invalid("cannot build a vocabulary from no passages"));
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for passage in train {
        for token in &passage.tokens {
            *freq.entry(token.surface.as_str()).or_insert(0) += 1;
        }
    }
    let mut vocab = Vocabulary::new();
    for passage in train {
        for token in &passage.tokens {
            if freq[token.surface.as_str()] >= min_freq {
                vocab.words.insert(&token.surface);
            }
            if let Some(pos) = &token.pos {
                vocab.pos.insert(pos);
            }
            if let Some(dep) = &token.dep {
                vocab.deps.insert(dep);
            }
        }
    }
    Ok(vocab)
}

// ---------------------------------------------------------------------------
// External formats
// ---------------------------------------------------------------------------

/// One line of the line-delimited corpus format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PassageRecord {
    pub doc_id: String,
    pub passage_index: usize,
    pub tokens: Vec<String>,
    pub labels: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep: Option<Vec<String>>,
}

impl From<&Passage> for PassageRecord {
    fn from(p: &Passage) -> Self {
        let pos: Option<Vec<String>> = p
            .tokens
            .iter()
            .map(|t| t.pos.clone())
            .collect::<Option<Vec<_>>>();
        let dep: Option<Vec<String>> = p
            .tokens
            .iter()
            .map(|t| t.dep.clone())
            .collect::<Option<Vec<_>>>();
        PassageRecord {
            doc_id: p.doc_id.clone(),
            passage_index: p.passage_index,
            tokens: p.tokens.iter().map(|t| t.surface.clone()).collect(),
            labels: p.labels.clone(),
            pos,
            dep,
        }
    }
}

impl PassageRecord {
    pub fn into_passage(self) -> Result<Passage> {
        if self.tokens.len() != self.labels.len() {
            return Err(Error::invalid(format!(
                "passage {}/{}: {} tokens but {} labels",
                self.doc_id,
                self.passage_index,
                self.tokens.len(),
                self.labels.len()
            )));
        }
        for arrays in [&self.pos, &self.dep].into_iter().flatten() {
            if arrays.len() != self.tokens.len() {
                return Err(Error::invalid(format!(
                    "passage {}/{}: annotation arrays must match token count",
                    self.doc_id, self.passage_index
                )));
            }
        }
        let tokens = self
            .tokens
            .into_iter()
            .enumerate()
            .map(|(i, surface)| AnnotatedToken {
                surface,
                pos: self.pos.as_ref().map(|v| v[i].clone()),
                dep: self.dep.as_ref().map(|v| v[i].clone()),
                channel: None,
                start_time: None,
                duration: None,
            })
            .collect();
        Ok(Passage {
            doc_id: self.doc_id,
            passage_index: self.passage_index,
            tokens,
            labels: self.labels,
        })
    }
}

/// Serializes passages to the line-delimited corpus format.
pub fn write_passages<W: Write>(mut out: W, passages: &[Passage], path: &Path) -> Result<()> {
    for passage in passages {
        let record = PassageRecord::from(passage);
        let line = serde_json::to_string(&record)
            .map_err(|e| Error::invalid(format!("serializing passage: {e}")))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn write_passages_file(path: &Path, passages: &[Passage]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_passages(std::io::BufWriter::new(file), passages, path)
}

pub fn read_passages_file(path: &Path) -> Result<Vec<Passage>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut passages = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PassageRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        passages.push(record.into_passage()?);
    }
    Ok(passages)
}

/// Loads a directory of plain-text subtitle documents: one `.txt` file per
/// document, one subtitle line per text line, file stem as doc id. Documents
/// come back sorted by id.
pub fn load_document_dir(dir: &Path) -> Result<Vec<RawDocument>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |ext| ext == "txt"))
        .collect();
    paths.sort();
    let mut docs = Vec::with_capacity(paths.len());
    for path in paths {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::invalid(format!("{}: bad file name", path.display())))?
            .to_string();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let lines: Vec<String> = text.lines().map(str::to_string).collect();
        if lines.is_empty() {
            return Err(Error::parse(&path, 1, "document file is empty"));
        }
        docs.push(RawDocument::new(stem, lines)?);
    }
    if docs.is_empty() {
        return Err(Error::invalid(format!(
            "{}: no .txt documents found",
            dir.display()
        )));
    }
    Ok(docs)
}

/// Counts echoed in the corpus-build stats table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitStats {
    pub documents: usize,
    pub passages: usize,
    pub segments: usize,
    pub tokens: usize,
}

pub fn split_stats(passages: &[Passage]) -> SplitStats {
    let docs: BTreeSet<&str> = passages.iter().map(|p| p.doc_id.as_str()).collect();
    SplitStats {
        documents: docs.len(),
        passages: passages.len(),
        segments: passages.iter().map(Passage::boundary_count).sum(),
        tokens: passages.iter().map(|p| p.tokens.len()).sum(),
    }
}
