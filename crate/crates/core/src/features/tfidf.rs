//! Vocabulary construction and TF-IDF vectorization.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::numerics::SparseRowMatrix;

/// Per-term statistics: the column index (lexicographic rank) and the
/// number of documents containing the term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermInfo {
    pub index: usize,
    pub df: usize,
}

/// Term dictionary over a corpus. Indices are assigned in lexicographic
/// term order, so they form a bijection onto `0..len()`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocabulary {
    pub n_documents: usize,
    pub terms: BTreeMap<String, TermInfo>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<TermInfo> {
        self.terms.get(term).copied()
    }

    pub fn write_json_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, self)
            .map_err(|e| Error::Format(format!("vocabulary serialization: {e}")))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read_json_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let r = BufReader::new(std::fs::File::open(path)?);
        serde_json::from_reader(r).map_err(|e| Error::Format(format!("vocabulary parse: {e}")))
    }
}

/// Fixed TF-IDF convention: raw in-document term counts, smoothed inverse
/// document frequency `ln((1 + N) / (1 + df)) + 1`, and L2 row
/// normalization.
#[derive(Debug, Clone, Copy, Default)]
pub struct TfidfParams;

/// Smoothed inverse document frequency.
pub fn idf(df: usize, n_documents: usize) -> f64 {
    ((1.0 + n_documents as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Builds the vocabulary: one entry per distinct token, lexicographically
/// ordered index assignment, document frequency per term.
pub fn build_vocabulary(corpus: &Corpus) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput("cannot build vocabulary of empty corpus".into()));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &corpus.documents {
        let distinct: BTreeSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for term in distinct {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let terms = df
        .into_iter()
        .enumerate()
        .map(|(index, (term, df))| (term.to_owned(), TermInfo { index, df }))
        .collect();
    Ok(Vocabulary {
        n_documents: corpus.len(),
        terms,
    })
}

/// TF-IDF matrix of the corpus: `entry(d, t) = tf(d, t) * idf(t)`, each
/// non-empty row L2-normalized to unit norm. Tokens absent from the
/// vocabulary are skipped.
pub fn tfidf_transform(corpus: &Corpus, vocab: &Vocabulary, _params: &TfidfParams) -> SparseRowMatrix {
    let n = vocab.n_documents;
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(corpus.len());
    for doc in &corpus.documents {
        // BTreeMap keeps terms sorted, and lexicographic term order is
        // exactly ascending column order
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for tok in &doc.tokens {
            *counts.entry(tok.as_str()).or_insert(0) += 1;
        }
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(counts.len());
        for (term, tf) in counts {
            if let Some(info) = vocab.get(term) {
                row.push((info.index as u32, tf as f64 * idf(info.df, n)));
            }
        }
        let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in row.iter_mut() {
                *v /= norm;
            }
        }
        rows.push(row);
    }
    SparseRowMatrix::from_rows(vocab.len(), &rows)
        .expect("tf-idf rows are sorted with positive finite weights")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{merge_dedupe, RawRecord, Source};

    fn corpus_of(texts: &[&str]) -> Corpus {
        let records: Vec<RawRecord> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| RawRecord {
                id: i.to_string(),
                text: (*t).to_string(),
                gold_label: None,
                source: Source::Kaggle,
            })
            .collect();
        merge_dedupe(&[], &records).unwrap().0
    }

    #[test]
    fn vocabulary_counts_documents_not_occurrences() {
        let corpus = corpus_of(&["x x x"]);
        let vocab = build_vocabulary(&corpus).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.get("x").unwrap().df, 1);
    }

    #[test]
    fn vocabulary_df_and_indices() {
        let corpus = corpus_of(&["apple banana", "banana cherry"]);
        let vocab = build_vocabulary(&corpus).unwrap();
        assert_eq!(vocab.len(), 3);
        assert_eq!(vocab.get("apple").unwrap(), TermInfo { index: 0, df: 1 });
        assert_eq!(vocab.get("banana").unwrap(), TermInfo { index: 1, df: 2 });
        assert_eq!(vocab.get("cherry").unwrap(), TermInfo { index: 2, df: 1 });
    }

    #[test]
    fn empty_corpus_is_error() {
        let corpus = Corpus { documents: vec![] };
        assert!(build_vocabulary(&corpus).is_err());
    }

    #[test]
    fn idf_of_ubiquitous_term_is_one() {
        assert_eq!(idf(3, 3), 1.0);
    }

    #[test]
    fn idf_decreases_with_df() {
        let n = 100;
        for df in 1..n {
            assert!(idf(df, n) > idf(df + 1, n));
        }
    }

    #[test]
    fn hand_evaluated_weights() {
        let corpus = corpus_of(&["cat sat", "cat ran", "dog ran"]);
        let vocab = build_vocabulary(&corpus).unwrap();
        let m = tfidf_transform(&corpus, &vocab, &TfidfParams);
        let (cols, vals) = m.row(0);
        // hand evaluation: idf(cat) = ln(4/3)+1, idf(sat) = ln(2)+1, L2 normalized
        let cat = (4.0f64 / 3.0).ln() + 1.0;
        let sat = 2.0f64.ln() + 1.0;
        let norm = (cat * cat + sat * sat).sqrt();
        assert_eq!(cols, &[vocab.get("cat").unwrap().index as u32, vocab.get("sat").unwrap().index as u32]);
        assert!((vals[0] - cat / norm).abs() < 1e-12);
        assert!((vals[1] - sat / norm).abs() < 1e-12);
        assert!((vals[0] - 0.605).abs() < 1e-3);
        assert!((vals[1] - 0.796).abs() < 1e-3);
    }

    #[test]
    fn rows_are_unit_norm() {
        let corpus = corpus_of(&[
            "alpha beta gamma",
            "beta gamma delta delta",
            "gamma epsilon",
            "zeta eta theta iota",
        ]);
        let vocab = build_vocabulary(&corpus).unwrap();
        let m = tfidf_transform(&corpus, &vocab, &TfidfParams);
        for i in 0..m.rows() {
            let (_, vals) = m.row(i);
            let norm: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12, "row {i} norm {norm}");
        }
    }

    #[test]
    fn vocab_json_roundtrip() {
        let corpus = corpus_of(&["red green", "green blue"]);
        let vocab = build_vocabulary(&corpus).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.json");
        vocab.write_json_path(&path).unwrap();
        let back = Vocabulary::read_json_path(&path).unwrap();
        assert_eq!(back.terms, vocab.terms);
        assert_eq!(back.n_documents, vocab.n_documents);
    }
}
