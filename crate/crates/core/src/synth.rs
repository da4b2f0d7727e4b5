//! Synthetic tweet-like corpus generator.
//!
//! Documents are drawn from three overlapping topic-word distributions
//! plus a large shared vocabulary, then decorated with the noise real
//! tweets carry (casing, hashtags, mentions, URLs, punctuation) so the
//! cleaning pipeline has real work to do. Used by the benchmark fixtures
//! and as demo data when the real datasets are unavailable.

use std::path::Path;

use crate::corpus::{clean_record, english_stopwords, Corpus, Document, RawRecord, Source};
use crate::error::Result;
use crate::numerics::SeededRng;

const TOPIC_NAMES: [&str; 3] = ["negative", "positive", "neutral"];

const TOPIC_WORDS: [&[&str]; 3] = [
    // gripes: outages, delays, broken things
    &[
        "phone", "battery", "update", "screen", "app", "camera", "laptop", "charger", "bug",
        "glitch", "signal", "wifi", "crash", "storage", "login", "password", "refund", "support",
        "ticket", "queue", "delay", "cancelled", "broken", "slow", "outage", "error", "freeze",
        "restart", "drain", "spam", "scam", "bill", "charge", "fee", "warranty", "repair",
        "complaint", "hold", "waiting", "line",
    ],
    // fandom: games, matches, wins
    &[
        "game", "team", "match", "score", "goal", "win", "season", "player", "coach", "league",
        "fans", "stadium", "tickets", "finals", "championship", "defense", "offense", "referee",
        "penalty", "overtime", "tournament", "practice", "training", "draft", "trade",
        "playoffs", "basketball", "football", "soccer", "baseball", "hockey", "tennis", "golf",
        "derby", "cup", "title", "victory", "highlights", "comeback", "streak",
    ],
    // daily life: food, travel, weather
    &[
        "coffee", "breakfast", "lunch", "dinner", "recipe", "pizza", "burger", "salad",
        "dessert", "restaurant", "flight", "airport", "hotel", "beach", "vacation", "trip",
        "travel", "luggage", "passport", "sunset", "island", "mountain", "hiking", "camping",
        "roadtrip", "tacos", "sushi", "pasta", "brunch", "bakery", "chocolate", "espresso",
        "pancakes", "waffles", "sandwich", "noodles", "curry", "kitchen", "rain", "sunshine",
    ],
];

const SHARED_WORDS: &[&str] = &[
    "the", "a", "to", "and", "of", "in", "is", "it", "my", "for", "on", "with", "this", "that",
    "was", "so", "but", "not", "have", "just", "really", "today", "love", "hate", "good", "bad",
    "great", "terrible", "awesome", "awful", "nice", "best", "worst", "happy", "sad", "angry",
    "excited", "bored", "tired", "feeling", "thinking", "watching", "going", "getting",
    "making", "looking", "trying", "wanna", "gonna", "lol", "omg", "wow", "yeah", "please",
    "thanks", "sorry", "maybe", "never", "always", "still", "again", "soon", "later", "tonight",
    "tomorrow", "yesterday", "morning", "evening", "weekend", "week", "day", "night", "time",
    "people", "friend", "family", "home", "work", "school", "life", "world", "thing", "stuff",
    "everyone", "someone", "nobody", "anything", "everything", "nothing", "back", "new", "one",
    "two", "big", "little", "long", "right", "well", "much", "need", "want", "know", "think",
    "feel", "made", "got", "see", "say", "come", "take",
];

/// Mixing weights of the three topics. Deliberately unbalanced: real
/// sentiment streams are dominated by one mood, and the imbalance is what
/// separates partition-based from exemplar-based clustering here.
const TOPIC_WEIGHTS: [f64; 3] = [0.62, 0.24, 0.14];
/// Probability that a token comes from the shared pool instead of the
/// document's topic.
const SHARED_PROB: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_documents: usize,
    pub seed: u64,
    pub source: Source,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_documents: 5000,
            seed: 1,
            source: Source::Kaggle,
        }
    }
}

fn pick_topic(rng: &mut SeededRng) -> usize {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (t, w) in TOPIC_WEIGHTS.iter().enumerate() {
        acc += w;
        if u < acc {
            return t;
        }
    }
    TOPIC_WEIGHTS.len() - 1
}

/// Rank-skewed pick: low indices come up more often.
fn skewed_index(rng: &mut SeededRng, len: usize) -> usize {
    let u = rng.next_f64();
    ((u * u * len as f64) as usize).min(len - 1)
}

fn raw_tweet(rng: &mut SeededRng) -> (String, usize) {
    let topic = pick_topic(rng);
    let len = 6 + rng.next_below(10) as usize;
    let mut words: Vec<String> = Vec::with_capacity(len);
    for _ in 0..len {
        let w = if rng.next_f64() < SHARED_PROB {
            SHARED_WORDS[skewed_index(rng, SHARED_WORDS.len())]
        } else {
            let pool = TOPIC_WORDS[topic];
            pool[skewed_index(rng, pool.len())]
        };
        words.push(w.to_string());
    }
    // tweet-flavored noise, stripped again by the cleaning pipeline
    if rng.next_f64() < 0.5 {
        words[0] = capitalize(&words[0]);
    }
    if rng.next_f64() < 0.08 {
        let i = rng.next_below(words.len() as u64) as usize;
        words[i] = format!("#{}", words[i]);
    }
    if rng.next_f64() < 0.06 {
        words.push(format!("@user{}", rng.next_below(1000)));
    }
    if rng.next_f64() < 0.06 {
        words.push(format!("https://t.co/{:x}", rng.next_below(0xffffff)));
    }
    let mut text = words.join(" ");
    if rng.next_f64() < 0.4 {
        text.push_str(["!", "!!", ".", "?"][rng.next_below(4) as usize]);
    }
    (text, topic)
}

fn capitalize(w: &str) -> String {
    let mut cs = w.chars();
    match cs.next() {
        Some(first) => first.to_uppercase().collect::<String>() + cs.as_str(),
        None => String::new(),
    }
}

/// Generates raw tweet-like records. Text may clean to a duplicate or to
/// nothing; use [`synthetic_corpus`] for a deduplicated corpus of an exact
/// size.
pub fn synthetic_records(count: usize, cfg: &SynthConfig) -> Vec<RawRecord> {
    let mut rng = SeededRng::new(cfg.seed);
    (0..count)
        .map(|i| {
            let (text, topic) = raw_tweet(&mut rng);
            RawRecord {
                id: format!("synth-{i}"),
                text,
                gold_label: Some(TOPIC_NAMES[topic].to_string()),
                source: cfg.source,
            }
        })
        .collect()
}

/// Generates a cleaned, deduplicated corpus of exactly `cfg.n_documents`
/// documents (keeps drawing until enough unique cleaned texts appear).
pub fn synthetic_corpus(cfg: &SynthConfig) -> Corpus {
    let stopwords = english_stopwords();
    let mut rng = SeededRng::new(cfg.seed);
    let mut seen = std::collections::HashSet::new();
    let mut documents = Vec::with_capacity(cfg.n_documents);
    let mut serial = 0usize;
    while documents.len() < cfg.n_documents {
        let (text, topic) = raw_tweet(&mut rng);
        let record = RawRecord {
            id: format!("synth-{serial}"),
            text,
            gold_label: Some(TOPIC_NAMES[topic].to_string()),
            source: cfg.source,
        };
        serial += 1;
        if let Some((clean, tokens)) = clean_record(&record, stopwords) {
            if seen.insert(clean.clone()) {
                documents.push(Document {
                    doc_id: documents.len(),
                    source: record.source,
                    raw_text: record.text,
                    clean_text: clean,
                    gold_label: record.gold_label,
                    tokens,
                });
            }
        }
    }
    Corpus { documents }
}

/// Writes records in the Zhang CSV schema
/// (`original_index,sid,text,label`).
pub fn write_zhang_csv<P: AsRef<Path>>(path: P, records: &[RawRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_io)?;
    w.write_record(["original_index", "sid", "text", "label"])
        .map_err(csv_io)?;
    for (i, r) in records.iter().enumerate() {
        w.write_record([
            i.to_string().as_str(),
            r.id.as_str(),
            r.text.as_str(),
            r.gold_label.as_deref().unwrap_or(""),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes records in the Kaggle CSV schema
/// (`textID,text,selected_text,sentiment`).
pub fn write_kaggle_csv<P: AsRef<Path>>(path: P, records: &[RawRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_io)?;
    w.write_record(["textID", "text", "selected_text", "sentiment"])
        .map_err(csv_io)?;
    for r in records {
        w.write_record([
            r.id.as_str(),
            r.text.as_str(),
            "",
            r.gold_label.as_deref().unwrap_or(""),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Format(format!("csv write: {e}"))
}
