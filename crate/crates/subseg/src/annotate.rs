//! Syntactic annotation from precomputed parser output.
//!
//! We never run a parser; we ingest the standard ten-column dependency
//! treebank format (one token per row, tab-separated, blank line between
//! sentences) and align its rows to corpus token streams. When no parser
//! output exists, [`null_annotate`] supplies UNK tags so the tagger input
//! shape is the same either way.

use std::fs;
use std::path::Path;

use crate::token::AnnotatedToken;
use crate::{Error, Result};

/// One parsed token row: surface form, universal POS, dependency relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnRow {
    pub form: String,
    pub upos: Option<String>,
    pub deprel: Option<String>,
}

/// Parser output for one document, in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationFile {
    pub sentences: Vec<Vec<AnnRow>>,
}

impl AnnotationFile {
    pub fn rows(&self) -> impl Iterator<Item = &AnnRow> {
        self.sentences.iter().flatten()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

fn opt_field(s: &str) -> Option<String> {
    if s.is_empty() || s == "_" {
        None
    } else {
        Some(s.to_string())
    }
}

/// Parses ten-column annotation text. Comment lines are ignored, blank lines
/// separate sentences, multiword-range and empty-node rows are skipped.
pub fn parse_annotations(text: &str, path: &Path) -> Result<AnnotationFile> {
    let mut file = AnnotationFile::default();
    let mut sentence: Vec<AnnRow> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !sentence.is_empty() {
                file.sentences.push(std::mem::take(&mut sentence));
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 8 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected at least 8 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        // multiword ranges ("1-2") and empty nodes ("8.1") carry no tree row
        if id.contains('-') || id.contains('.') {
            continue;
        }
        if id.parse::<u64>().is_err() {
            return Err(Error::parse(path, lineno, format!("bad token id {id:?}")));
        }
        sentence.push(AnnRow {
            form: cols[1].to_string(),
            upos: opt_field(cols[3]),
            deprel: opt_field(cols[7]),
        });
    }
    if !sentence.is_empty() {
        file.sentences.push(sentence);
    }
    Ok(file)
}

pub fn load_annotations(path: &Path) -> Result<AnnotationFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text, path)
}

/// Attaches parser tags to a corpus token stream by position.
///
/// Strict mode demands a 1:1 match on lowercased surface forms and fails at
/// the first divergent index. Lenient mode computes a maximal order-preserving
/// matching (ties resolved by skipping annotation rows first, so corpus
/// tokens match as early as possible); unmatched positions get UNK tags.
pub fn align(tokens: &[String], ann: &AnnotationFile, lenient: bool) -> Result<Vec<AnnotatedToken>> {
    let rows: Vec<&AnnRow> = ann.rows().collect();
    let forms: Vec<String> = rows.iter().map(|r| r.form.to_lowercase()).collect();

    if !lenient {
        let shared = tokens.len().min(forms.len());
        for i in 0..shared {
            if tokens[i] != forms[i] {
                return Err(Error::invalid(format!(
                    "strict alignment failed at index {i}: token {:?} vs annotation {:?}",
                    tokens[i], forms[i]
                )));
            }
        }
        if tokens.len() != forms.len() {
            return Err(Error::invalid(format!(
                "strict alignment failed at index {shared}: {} tokens vs {} annotation rows",
                tokens.len(),
                forms.len()
            )));
        }
        return Ok(tokens
            .iter()
            .zip(&rows)
            .map(|(t, r)| annotated(t, Some(r)))
            .collect());
    }

    let assignment = maximal_matching(tokens, &forms);
    Ok(tokens
        .iter()
        .zip(&assignment)
        .map(|(t, j)| annotated(t, j.map(|j| rows[j])))
        .collect())
}

fn annotated(surface: &str, row: Option<&AnnRow>) -> AnnotatedToken {
    AnnotatedToken {
        surface: surface.to_string(),
        pos: row.and_then(|r| r.upos.clone()),
        dep: row.and_then(|r| r.deprel.clone()),
        channel: None,
        start_time: None,
        duration: None,
    }
}

/// For each token index, the matched annotation index (or None), under the
/// maximal order-preserving matching with annotation-skip-first ties.
fn maximal_matching(tokens: &[String], forms: &[String]) -> Vec<Option<usize>> {
    let m = tokens.len();
    let n = forms.len();
    // dp[i][j] = size of maximal matching between tokens[i..] and forms[j..]
    let mut dp = vec![vec![0u32; n + 1]; m + 1];
    for i in (0..m).rev() {
        for j in (0..n).rev() {
            let skip = dp[i + 1][j].max(dp[i][j + 1]);
            dp[i][j] = if tokens[i] == forms[j] {
                skip.max(dp[i + 1][j + 1] + 1)
            } else {
                skip
            };
        }
    }
    let mut assignment = vec![None; m];
    let (mut i, mut j) = (0, 0);
    while i < m && j < n {
        if tokens[i] == forms[j] && dp[i][j] == dp[i + 1][j + 1] + 1 {
            assignment[i] = Some(j);
            i += 1;
            j += 1;
        } else if dp[i][j + 1] >= dp[i + 1][j] {
            j += 1; // prefer consuming the annotation side on ties
        } else {
            i += 1;
        }
    }
    assignment
}

/// All-UNK annotation: the tagger input for the syntax-free model.
pub fn null_annotate(tokens: &[String]) -> Vec<AnnotatedToken> {
    tokens.iter().map(|t| annotated(t, None)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("test.conllu")
    }

    fn row(id: &str, form: &str, upos: &str, deprel: &str) -> String {
        format!("{id}\t{form}\t_\t{upos}\t_\t_\t0\t{deprel}\t_\t_")
    }

    #[test]
    fn parses_column_positions() {
        let text = row("1", "okay", "INTJ", "discourse");
        let file = parse_annotations(&text, &p()).unwrap();
        assert_eq!(
            file.sentences,
            vec![vec![AnnRow {
                form: "okay".into(),
                upos: Some("INTJ".into()),
                deprel: Some("discourse".into()),
            }]]
        );
    }

    #[test]
    fn blank_lines_separate_sentences() {
        let text = [
            row("1", "a", "X", "dep"),
            row("2", "b", "X", "dep"),
            row("3", "c", "X", "dep"),
            String::new(),
            row("1", "d", "X", "dep"),
            row("2", "e", "X", "dep"),
            row("3", "f", "X", "dep"),
        ]
        .join("\n");
        let file = parse_annotations(&text, &p()).unwrap();
        assert_eq!(file.sentences.len(), 2);
        assert_eq!(file.token_count(), 6);
    }

    #[test]
    fn range_rows_are_skipped() {
        let text = [
            row("1-2", "del", "_", "_"),
            row("1", "de", "ADP", "case"),
            row("2", "el", "DET", "det"),
        ]
        .join("\n");
        let file = parse_annotations(&text, &p()).unwrap();
        assert_eq!(file.token_count(), 2);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let text = format!("{}\nnot\tenough\tcolumns", row("1", "ok", "X", "dep"));
        let err = parse_annotations(&text, &p()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.conllu:2"), "got {msg}");
    }

    #[test]
    fn underscore_fields_become_unknown() {
        let text = row("1", "hm", "_", "_");
        let file = parse_annotations(&text, &p()).unwrap();
        assert_eq!(file.sentences[0][0].upos, None);
        assert_eq!(file.sentences[0][0].deprel, None);
    }

    fn ann_of(entries: &[(&str, &str, &str)]) -> AnnotationFile {
        AnnotationFile {
            sentences: vec![entries
                .iter()
                .map(|(f, u, d)| AnnRow {
                    form: f.to_string(),
                    upos: Some(u.to_string()),
                    deprel: Some(d.to_string()),
                })
                .collect()],
        }
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn strict_alignment_assigns_all_tags() {
        let ann = ann_of(&[("Okay", "INTJ", "discourse"), ("go", "VERB", "root")]);
        let out = align(&toks(&["okay", "go"]), &ann, false).unwrap();
        assert_eq!(out[0].pos.as_deref(), Some("INTJ"));
        assert_eq!(out[1].dep.as_deref(), Some("root"));
    }

    #[test]
    fn strict_alignment_names_first_divergence() {
        let ann = ann_of(&[("okay", "INTJ", "discourse"), ("stop", "VERB", "root")]);
        let err = align(&toks(&["okay", "go"]), &ann, false).unwrap_err();
        assert!(err.to_string().contains("index 1"), "got {err}");
    }

    #[test]
    fn strict_alignment_rejects_length_mismatch() {
        let ann = ann_of(&[("okay", "INTJ", "discourse")]);
        assert!(align(&toks(&["okay", "go"]), &ann, false).is_err());
    }

    #[test]
    fn lenient_alignment_fills_gap_with_unk() {
        // annotation is missing the middle token
        let ann = ann_of(&[("a", "X", "d1"), ("c", "Z", "d3")]);
        let out = align(&toks(&["a", "b", "c"]), &ann, true).unwrap();
        assert_eq!(out[0].pos.as_deref(), Some("X"));
        assert_eq!(out[1].pos, None);
        assert_eq!(out[2].pos.as_deref(), Some("Z"));
    }

    #[test]
    fn null_annotate_is_all_unk() {
        let out = null_annotate(&toks(&["x", "y"]));
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|t| t.pos.is_none() && t.dep.is_none()));
        assert!(null_annotate(&[]).is_empty());
    }

    // Independent oracle: recursive memoized maximal matching with the same
    // declared tie rule (skip annotation rows first).
    fn oracle_assignment(tokens: &[String], forms: &[String]) -> Vec<Option<usize>> {
        fn best(
            i: usize,
            j: usize,
            tokens: &[String],
            forms: &[String],
            memo: &mut Vec<Vec<Option<u32>>>,
        ) -> u32 {
            if i == tokens.len() || j == forms.len() {
                return 0;
            }
            if let Some(v) = memo[i][j] {
                return v;
            }
            let mut v = best(i, j + 1, tokens, forms, memo).max(best(i + 1, j, tokens, forms, memo));
            if tokens[i] == forms[j] {
                v = v.max(1 + best(i + 1, j + 1, tokens, forms, memo));
            }
            memo[i][j] = Some(v);
            v
        }
        let mut memo = vec![vec![None; forms.len() + 1]; tokens.len() + 1];
        let mut out = vec![None; tokens.len()];
        let (mut i, mut j) = (0, 0);
        while i < tokens.len() && j < forms.len() {
            let here = best(i, j, tokens, forms, &mut memo);
            if tokens[i] == forms[j] && here == 1 + best(i + 1, j + 1, tokens, forms, &mut memo) {
                out[i] = Some(j);
                i += 1;
                j += 1;
            } else if best(i, j + 1, tokens, forms, &mut memo) >= best(i + 1, j, tokens, forms, &mut memo)
            {
                j += 1;
            } else {
                i += 1;
            }
        }
        out
    }

    #[test]
    fn lenient_alignment_matches_dp_oracle_on_fuzzed_deletions() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let vocab: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
        let tokens: Vec<String> = (0..1000)
            .map(|_| vocab.choose(&mut rng).unwrap().clone())
            .collect();
        // annotation stream: tokens with ~8% deletions and their tags
        let mut kept = Vec::new();
        for (i, t) in tokens.iter().enumerate() {
            if rng.gen_bool(0.92) {
                kept.push(AnnRow {
                    form: t.clone(),
                    upos: Some(format!("P{i}")),
                    deprel: Some(format!("D{i}")),
                });
            }
        }
        let n_kept = kept.len();
        let ann = AnnotationFile {
            sentences: vec![kept],
        };
        let forms: Vec<String> = ann.rows().map(|r| r.form.to_lowercase()).collect();

        let ours = align(&tokens, &ann, true).unwrap();
        let oracle = oracle_assignment(&tokens, &forms);
        let rows: Vec<&AnnRow> = ann.rows().collect();
        for (i, (got, want)) in ours.iter().zip(&oracle).enumerate() {
            let want_pos = want.and_then(|j| rows[j].upos.clone());
            assert_eq!(got.pos, want_pos, "divergence at token {i}");
        }
        // deletions-only input: every annotation row finds a home
        let matched = ours.iter().filter(|t| t.pos.is_some()).count();
        assert_eq!(matched, n_kept);
        assert_eq!(ours.len(), tokens.len());
    }
}
