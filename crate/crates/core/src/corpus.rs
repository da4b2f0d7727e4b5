//! Loading, cleaning, and merging the two tweet CSV datasets.
//!
//! The pipeline turns raw tweets into a deduplicated [`Corpus`] of
//! [`Document`]s whose `clean_text` is lowercase, free of URLs, mentions,
//! and punctuation, and stripped of stop words.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which input dataset a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Zhang,
    Kaggle,
}

/// One row of an input CSV, before any cleaning.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub id: String,
    pub text: String,
    pub gold_label: Option<String>,
    pub source: Source,
}

/// A cleaned, retained document. `clean_text` is always exactly
/// `tokens.join(" ")`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: usize,
    pub source: Source,
    pub raw_text: String,
    pub clean_text: String,
    pub gold_label: Option<String>,
    #[serde(skip)]
    pub tokens: Vec<String>,
}

impl Document {
    fn rebuild_tokens(&mut self) {
        self.tokens = if self.clean_text.is_empty() {
            Vec::new()
        } else {
            self.clean_text.split(' ').map(str::to_owned).collect()
        };
    }
}

/// The merged, deduplicated corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Retained document counts per source: `(zhang, kaggle)`.
    pub fn source_counts(&self) -> (usize, usize) {
        let zhang = self
            .documents
            .iter()
            .filter(|d| d.source == Source::Zhang)
            .count();
        (zhang, self.documents.len() - zhang)
    }

    /// Writes JSON lines, one object per document, LF line endings.
    pub fn write_jsonl<W: Write>(&self, w: &mut W) -> Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut *w, doc)
                .map_err(|e| Error::Format(format!("corpus serialization: {e}")))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_jsonl_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let r = BufReader::new(std::fs::File::open(path.as_ref())?);
        let mut documents = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut doc: Document = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: path_str.clone(),
                line: i as u64 + 1,
                message: e.to_string(),
            })?;
            doc.rebuild_tokens();
            documents.push(doc);
        }
        Ok(Corpus { documents })
    }
}

/// Counts reported by [`merge_dedupe`].
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MergeReport {
    pub input_records: usize,
    pub dropped_empty: usize,
    pub dropped_duplicates: usize,
    pub retained: usize,
}

/// Result of loading one CSV file.
#[derive(Debug)]
pub struct CsvLoad {
    pub records: Vec<RawRecord>,
    pub dropped_empty_text: usize,
}

/// The bundled English stop-word list (127 words, see
/// `data/stopwords_en.txt`).
pub fn english_stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        include_str!("../data/stopwords_en.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Cleans one raw tweet. Steps, in order:
///
/// 1. lowercase;
/// 2. delete URL tokens (whitespace-delimited tokens containing "http" or
///    starting with "www."; the broad "contains" rule is what guarantees
///    no cleaned document ever contains the substring "http");
/// 3. delete @mention tokens entirely;
/// 4. strip '#' characters, keeping the tag word;
/// 5. replace every character outside `[a-z0-9 ]` with a space;
/// 6. collapse whitespace runs to single spaces and trim.
pub fn clean_text(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let mut kept = String::with_capacity(lowered.len());
    for token in lowered.split_whitespace() {
        if token.contains("http") || token.starts_with("www.") {
            continue;
        }
        if token.starts_with('@') {
            continue;
        }
        if !kept.is_empty() {
            kept.push(' ');
        }
        for ch in token.chars() {
            if ch == '#' {
                continue;
            }
            kept.push(ch);
        }
    }
    let replaced: String = kept
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() {
                c
            } else {
                ' '
            }
        })
        .collect();
    let mut out = String::with_capacity(replaced.len());
    for token in replaced.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

/// Splits cleaned text on single spaces and drops stop words, preserving
/// order. The surviving tokens re-joined define the document's final
/// `clean_text`.
pub fn tokenize_filter(clean: &str, stopwords: &HashSet<&str>) -> Vec<String> {
    if clean.is_empty() {
        return Vec::new();
    }
    clean
        .split(' ')
        .filter(|t| !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}

/// Loads the Zhang et al. dataset CSV (columns `original_index`, `sid`,
/// `text`, `label`). One record per data row.
pub fn load_zhang_csv<P: AsRef<Path>>(path: P) -> Result<CsvLoad> {
    load_csv(
        path,
        Source::Zhang,
        &["original_index", "sid", "text", "label"],
        "sid",
        "original_index",
        "text",
        "label",
        false,
    )
}

/// Loads the Kaggle tweet dataset CSV (columns `textID`, `text`,
/// `selected_text`, `sentiment`; `selected_text` is ignored). Rows with
/// missing or empty text are dropped and counted.
pub fn load_kaggle_csv<P: AsRef<Path>>(path: P) -> Result<CsvLoad> {
    load_csv(
        path,
        Source::Kaggle,
        &["textID", "text", "selected_text", "sentiment"],
        "textID",
        "textID",
        "text",
        "sentiment",
        true,
    )
}

#[allow(clippy::too_many_arguments)]
fn load_csv<P: AsRef<Path>>(
    path: P,
    source: Source,
    required: &[&str],
    id_col: &str,
    fallback_id_col: &str,
    text_col: &str,
    label_col: &str,
    drop_empty_text: bool,
) -> Result<CsvLoad> {
    let path_str = path.as_ref().display().to_string();
    let file = std::fs::File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new().from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| csv_error(&path_str, e))?
        .clone();
    let mut index_of = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        // tolerate a UTF-8 BOM on the first header
        let name = h.trim_start_matches('\u{feff}');
        index_of.insert(name.to_string(), i);
    }
    for col in required {
        if !index_of.contains_key(*col) {
            return Err(Error::Schema {
                path: path_str,
                column: (*col).to_string(),
            });
        }
    }
    let id_i = index_of[id_col];
    let fallback_i = index_of[fallback_id_col];
    let text_i = index_of[text_col];
    let label_i = index_of[label_col];

    let mut records = Vec::new();
    let mut dropped_empty_text = 0usize;
    for (row_no, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(&path_str, e))?;
        let text = row.get(text_i).unwrap_or("").to_string();
        if drop_empty_text && text.trim().is_empty() {
            dropped_empty_text += 1;
            continue;
        }
        let mut id = row.get(id_i).unwrap_or("").to_string();
        if id.is_empty() {
            id = row.get(fallback_i).unwrap_or("").to_string();
        }
        if id.is_empty() {
            id = row_no.to_string();
        }
        let label = row.get(label_i).unwrap_or("");
        let gold_label = if label.trim().is_empty() {
            None
        } else {
            Some(label.to_string())
        };
        records.push(RawRecord {
            id,
            text,
            gold_label,
            source,
        });
    }
    Ok(CsvLoad {
        records,
        dropped_empty_text,
    })
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = match e.position() {
        Some(p) => p.line(),
        None => 0,
    };
    Error::Parse {
        path: path.to_string(),
        line,
        message: e.to_string(),
    }
}

/// Cleans a record down to its final token list; `None` when nothing
/// survives cleaning.
pub(crate) fn clean_record(record: &RawRecord, stopwords: &HashSet<&str>) -> Option<(String, Vec<String>)> {
    let cleaned = clean_text(&record.text);
    let tokens = tokenize_filter(&cleaned, stopwords);
    if tokens.is_empty() {
        return None;
    }
    let clean = tokens.join(" ");
    Some((clean, tokens))
}

/// Concatenates the two record lists (Zhang first), cleans each record,
/// drops documents with empty cleaned text, deduplicates on exact
/// `clean_text` keeping the first occurrence, and assigns dense doc ids in
/// retained order.
pub fn merge_dedupe(zhang: &[RawRecord], kaggle: &[RawRecord]) -> Result<(Corpus, MergeReport)> {
    if zhang.is_empty() && kaggle.is_empty() {
        return Err(Error::EmptyInput("both record lists are empty".into()));
    }
    let stopwords = english_stopwords();
    let all: Vec<&RawRecord> = zhang.iter().chain(kaggle.iter()).collect();
    // cleaning is per-record pure; the merge below stays sequential so
    // "first occurrence wins" is well defined
    let cleaned: Vec<Option<(String, Vec<String>)>> = all
        .par_iter()
        .map(|r| clean_record(r, stopwords))
        .collect();

    let mut report = MergeReport {
        input_records: all.len(),
        ..MergeReport::default()
    };
    let mut seen: HashSet<&str> = HashSet::with_capacity(all.len());
    let mut documents = Vec::new();
    for (record, slot) in all.iter().zip(&cleaned) {
        match slot {
            None => report.dropped_empty += 1,
            Some((clean, tokens)) => {
                if !seen.insert(clean.as_str()) {
                    report.dropped_duplicates += 1;
                    continue;
                }
                documents.push(Document {
                    doc_id: documents.len(),
                    source: record.source,
                    raw_text: record.text.clone(),
                    clean_text: clean.clone(),
                    gold_label: record.gold_label.clone(),
                    tokens: tokens.clone(),
                });
            }
        }
    }
    report.retained = documents.len();
    Ok((Corpus { documents }, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(text: &str, source: Source) -> RawRecord {
        RawRecord {
            id: "x".into(),
            text: text.into(),
            gold_label: None,
            source,
        }
    }

    #[test]
    fn clean_text_paper_sample() {
        assert_eq!(clean_text("Happy Mothers Day mums"), "happy mothers day mums");
    }

    #[test]
    fn clean_text_empty() {
        assert_eq!(clean_text(""), "");
    }

    #[test]
    fn clean_text_noise_removal() {
        assert_eq!(
            clean_text("Check https://t.co/x #ThankYouObama @bob!!"),
            "check thankyouobama"
        );
    }

    #[test]
    fn clean_text_never_leaks_noise_markers() {
        for raw in [
            "see www.example.com now",
            "AHTTPB embedded",
            "mixedhttp://x.y tail",
            "#tag @mention plain",
            "ünïcode émoji 🎉 stays out",
        ] {
            let c = clean_text(raw);
            assert!(!c.contains("http"), "{raw:?} -> {c:?}");
            assert!(!c.contains('#'), "{raw:?} -> {c:?}");
            assert!(!c.contains('@'), "{raw:?} -> {c:?}");
            assert!(!c.chars().any(|ch| ch.is_ascii_uppercase()));
        }
    }

    #[test]
    fn tokenize_filter_basics() {
        let mut stop = HashSet::new();
        stop.insert("the");
        assert_eq!(tokenize_filter("the cat sat", &stop), vec!["cat", "sat"]);
        assert!(tokenize_filter("", &stop).is_empty());
    }

    #[test]
    fn tokenize_filter_bundled_list_matches_cleaned_sample() {
        let toks = tokenize_filter("go to bed muhammad ali", english_stopwords());
        assert_eq!(toks, vec!["go", "bed", "muhammad", "ali"]);
    }

    #[test]
    fn stopword_list_has_127_words() {
        assert_eq!(english_stopwords().len(), 127);
    }

    #[test]
    fn zhang_loader_reads_rows_and_quoting() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "original_index,sid,text,label").unwrap();
        writeln!(f, "0,s1,\"hello, \"\"world\"\"\",positive").unwrap();
        writeln!(f, "1,s2,plain text,").unwrap();
        let load = load_zhang_csv(f.path()).unwrap();
        assert_eq!(load.records.len(), 2);
        assert_eq!(load.records[0].text, "hello, \"world\"");
        assert_eq!(load.records[0].gold_label.as_deref(), Some("positive"));
        assert_eq!(load.records[1].gold_label, None);
        assert_eq!(load.records[0].id, "s1");
    }

    #[test]
    fn zhang_header_only_gives_empty_list() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "original_index,sid,text,label").unwrap();
        let load = load_zhang_csv(f.path()).unwrap();
        assert!(load.records.is_empty());
    }

    #[test]
    fn missing_column_names_the_column() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "original_index,sid,label").unwrap();
        let err = load_zhang_csv(f.path()).unwrap_err();
        match err {
            Error::Schema { column, .. } => assert_eq!(column, "text"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_quoting_reports_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "original_index,sid,text,label").unwrap();
        writeln!(f, "0,s1,\"unterminated,pos").unwrap();
        let err = load_zhang_csv(f.path()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "got {err:?}");
    }

    #[test]
    fn kaggle_drops_and_counts_empty_text() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "textID,text,selected_text,sentiment").unwrap();
        writeln!(f, "a1,good morning,good,neutral").unwrap();
        writeln!(f, "a2,,,negative").unwrap();
        writeln!(f, "a3,  ,,positive").unwrap();
        let load = load_kaggle_csv(f.path()).unwrap();
        assert_eq!(load.records.len(), 1);
        assert_eq!(load.dropped_empty_text, 2);
        assert_eq!(load.records[0].gold_label.as_deref(), Some("neutral"));
    }

    #[test]
    fn merge_dedupes_and_drops_empty() {
        let zhang = vec![
            record("Same tweet text", Source::Zhang),
            record("!!!", Source::Zhang), // cleans to empty
        ];
        let kaggle = vec![
            record("same tweet TEXT", Source::Kaggle), // duplicate after cleaning
            record("another one", Source::Kaggle),
        ];
        let (corpus, report) = merge_dedupe(&zhang, &kaggle).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(report.dropped_empty, 1);
        assert_eq!(report.dropped_duplicates, 1);
        assert_eq!(corpus.documents[0].source, Source::Zhang);
        let ids: Vec<usize> = corpus.documents.iter().map(|d| d.doc_id).collect();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn merge_empty_inputs_is_error() {
        assert!(merge_dedupe(&[], &[]).is_err());
    }

    #[test]
    fn merge_is_idempotent() {
        let records = vec![
            record("The quick brown fox", Source::Zhang),
            record("jumps over the lazy dog", Source::Kaggle),
        ];
        let (corpus, _) = merge_dedupe(&records, &[]).unwrap();
        let again: Vec<RawRecord> = corpus
            .documents
            .iter()
            .map(|d| RawRecord {
                id: d.doc_id.to_string(),
                text: d.raw_text.clone(),
                gold_label: d.gold_label.clone(),
                source: d.source,
            })
            .collect();
        let (corpus2, _) = merge_dedupe(&again, &[]).unwrap();
        assert_eq!(corpus.len(), corpus2.len());
        for (a, b) in corpus.documents.iter().zip(&corpus2.documents) {
            assert_eq!(a.clean_text, b.clean_text);
            assert_eq!(a.doc_id, b.doc_id);
        }
    }

    #[test]
    fn documents_satisfy_token_invariant() {
        let records = vec![record("Go to bed! #Sleep https://x.co @you", Source::Zhang)];
        let (corpus, _) = merge_dedupe(&records, &[]).unwrap();
        for d in &corpus.documents {
            assert_eq!(d.clean_text, d.tokens.join(" "));
            assert!(d.tokens.iter().all(|t| !english_stopwords().contains(t.as_str())));
        }
    }

    #[test]
    fn jsonl_roundtrip() {
        let records = vec![
            record("First tweet body", Source::Zhang),
            record("Second tweet body", Source::Kaggle),
        ];
        let (corpus, _) = merge_dedupe(&records, &[]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        corpus.write_jsonl_path(&path).unwrap();
        let back = Corpus::read_jsonl_path(&path).unwrap();
        assert_eq!(back.len(), corpus.len());
        for (a, b) in corpus.documents.iter().zip(&back.documents) {
            assert_eq!(a.clean_text, b.clean_text);
            assert_eq!(a.tokens, b.tokens);
            assert_eq!(a.source, b.source);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("{\"doc_id\":0,\"source\":\"zhang\""));
    }
}
