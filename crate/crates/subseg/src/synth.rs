//! Deterministic synthetic subtitle corpora with planted boundaries.
//!
//! The generator writes raw subtitle text (punctuation, turns, casing noise)
//! while recording exactly which segments it planted, so downstream counts
//! and labels can be checked against ground truth.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::RawDocument;

/// Settings for [`generate_synthetic_corpus`].
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub n_docs: usize,
    /// Inclusive range of subtitle lines per document.
    pub lines_per_doc: (usize, usize),
    /// Inclusive range of segments per line.
    pub segments_per_line: (usize, usize),
    /// Inclusive range of tokens per segment (counting the cue word).
    pub tokens_per_segment: (usize, usize),
    /// Size of the filler word pool.
    pub filler_vocab: usize,
    /// Words that can close a segment; fillers never collide with these.
    pub cue_words: Vec<String>,
    /// Probability that a segment ends with a cue word rather than a filler.
    pub cue_probability: f64,
    /// Probability that the last segment of a line carries a punctuation
    /// boundary; otherwise the line break alone marks it.
    pub line_end_punct_probability: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_docs: 10,
            lines_per_doc: (4, 10),
            segments_per_line: (1, 3),
            tokens_per_segment: (3, 8),
            filler_vocab: 40,
            cue_words: ["right", "okay", "yeah", "done", "over"]
                .into_iter()
                .map(String::from)
                .collect(),
            cue_probability: 1.0,
            line_end_punct_probability: 0.7,
        }
    }
}

/// A generated corpus plus its planted ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub documents: Vec<RawDocument>,
    /// Planted tokenized segments per doc id (what extraction must recover).
    pub segments: BTreeMap<String, Vec<Vec<String>>>,
}

impl SyntheticCorpus {
    /// Number of planted boundaries (= segments) in one document.
    pub fn boundary_count(&self, doc_id: &str) -> usize {
        self.segments.get(doc_id).map_or(0, Vec::len)
    }

    pub fn total_boundaries(&self) -> usize {
        self.segments.values().map(Vec::len).sum()
    }
}

const PUNCT_CHOICES: [&str; 6] = [".", "!", "?", ":", "..", "?!"];

fn filler_pool(size: usize) -> Vec<String> {
    // consonant-vowel syllable words, deterministic, disjoint from cues
    const C: [&str; 10] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "t"];
    const V: [&str; 5] = ["a", "e", "i", "o", "u"];
    (0..size)
        .map(|i| {
            let s1 = format!("{}{}", C[i % 10], V[(i / 10) % 5]);
            let s2 = format!("{}{}", C[(i / 50) % 10], V[(i / 500) % 5]);
            format!("{s1}{s2}{}", i % 10)
        })
        .collect()
}

fn range_sample(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi.max(lo))
}

/// Generates `config.n_docs` raw documents, deterministic under `seed`.
pub fn generate_synthetic_corpus(config: &GeneratorConfig, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fillers = filler_pool(config.filler_vocab.max(1));

    let mut documents = Vec::with_capacity(config.n_docs);
    let mut truth = BTreeMap::new();
    for doc_idx in 0..config.n_docs {
        let doc_id = format!("syn{doc_idx:04}");
        let mut lines = Vec::new();
        let mut doc_segments: Vec<Vec<String>> = Vec::new();
        let n_lines = range_sample(&mut rng, config.lines_per_doc);
        for _ in 0..n_lines {
            let n_segments = range_sample(&mut rng, config.segments_per_line);
            let mut line = String::new();
            for seg_idx in 0..n_segments {
                let n_tokens = range_sample(&mut rng, config.tokens_per_segment).max(1);
                let mut segment = Vec::with_capacity(n_tokens);
                for _ in 0..n_tokens - 1 {
                    segment.push(fillers.choose(&mut rng).unwrap().clone());
                }
                let last = if !config.cue_words.is_empty()
                    && rng.gen_bool(config.cue_probability.clamp(0.0, 1.0))
                {
                    config.cue_words.choose(&mut rng).unwrap().clone()
                } else {
                    fillers.choose(&mut rng).unwrap().clone()
                };
                segment.push(last);

                // render the segment with casing noise on the first word
                for (i, word) in segment.iter().enumerate() {
                    if i > 0 {
                        line.push(' ');
                    }
                    if i == 0 && rng.gen_bool(0.5) {
                        let mut chars = word.chars();
                        if let Some(first) = chars.next() {
                            line.extend(first.to_uppercase());
                            line.push_str(chars.as_str());
                        }
                    } else {
                        line.push_str(word);
                    }
                }
                let is_last_in_line = seg_idx == n_segments - 1;
                let wants_punct = !is_last_in_line
                    || rng.gen_bool(config.line_end_punct_probability.clamp(0.0, 1.0));
                if wants_punct {
                    line.push_str(PUNCT_CHOICES.choose(&mut rng).unwrap());
                }
                if !is_last_in_line {
                    line.push(' ');
                }
                doc_segments.push(segment);
            }
            lines.push(line);
        }
        documents.push(RawDocument::new(&doc_id, lines).expect("generated doc is well-formed"));
        truth.insert(doc_id, doc_segments);
    }
    SyntheticCorpus {
        documents,
        segments: truth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{extract_segments, CorpusOptions};

    #[test]
    fn generation_is_deterministic() {
        let config = GeneratorConfig::default();
        let a = generate_synthetic_corpus(&config, 11);
        let b = generate_synthetic_corpus(&config, 11);
        assert_eq!(a.documents, b.documents);
        assert_eq!(a.segments, b.segments);
    }

    #[test]
    fn extraction_recovers_planted_segments() {
        let config = GeneratorConfig {
            n_docs: 6,
            ..GeneratorConfig::default()
        };
        let corpus = generate_synthetic_corpus(&config, 23);
        let options = CorpusOptions::default();
        for doc in &corpus.documents {
            let extracted = extract_segments(doc, &options.boundary_chars);
            assert_eq!(&extracted, &corpus.segments[&doc.doc_id], "doc {}", doc.doc_id);
        }
    }

    #[test]
    fn thousand_line_document_has_planted_boundary_count() {
        let config = GeneratorConfig {
            n_docs: 1,
            lines_per_doc: (1000, 1000),
            ..GeneratorConfig::default()
        };
        let corpus = generate_synthetic_corpus(&config, 5);
        let doc = &corpus.documents[0];
        assert_eq!(doc.lines.len(), 1000);
        let extracted = extract_segments(doc, &CorpusOptions::default().boundary_chars);
        assert_eq!(extracted.len(), corpus.boundary_count(&doc.doc_id));
    }

    #[test]
    fn fillers_never_collide_with_cues() {
        let config = GeneratorConfig::default();
        let pool = filler_pool(config.filler_vocab);
        for cue in &config.cue_words {
            assert!(!pool.contains(cue));
        }
    }
}
