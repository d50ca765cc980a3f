//! Fixtures and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use fscmm::{Document, PseudoThesaurus, Resources, StopWordList};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn resource_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("resources").join(name)
}

/// Four documents whose feature counts are
/// F1:(1,1,0,4), F2:(0,3,2,0), F3:(1,0,1,0), labeled C1, C2, C2, C3.
pub fn reference_corpus() -> Vec<Document> {
    vec![
        Document::labeled("td1", "The F1 rises. F3 follows!", "C1"),
        Document::labeled("td2", "F1 and F2? F2, F2.", "C2"),
        Document::labeled("td3", "F2 F3. Then F2 again.", "C2"),
        Document::labeled("td4", "F1 F1. F1 of F1.", "C3"),
    ]
}

pub fn reference_resources() -> Resources {
    Resources::new(
        StopWordList::from_words(["the", "and", "of"]),
        PseudoThesaurus::new(["f1", "f2", "f3"], std::iter::empty::<(&str, &str)>()).unwrap(),
    )
}

/// Word lists behind a random-document generator, kept as plain data so
/// the oracle can apply them without going through the library.
pub struct Lexicon {
    pub stems: Vec<String>,
    pub variants: Vec<(String, String)>,
    pub stops: Vec<String>,
    pub invalid: Vec<String>,
}

impl Lexicon {
    /// 50 surface terms: 30 stems, 10 variants, 5 stop words, 5 invalid.
    pub fn fifty() -> Self {
        let stems: Vec<String> = (0..30).map(|i| format!("term{i:02}")).collect();
        let variants = (0..10).map(|i| (format!("term{i:02}ing"), stems[i * 3].clone())).collect();
        Lexicon {
            stems,
            variants,
            stops: ["the", "of", "and", "a", "to"].map(String::from).to_vec(),
            invalid: (0..5).map(|i| format!("zq{i}x")).collect(),
        }
    }

    pub fn surface_terms(&self) -> Vec<String> {
        self.stems
            .iter()
            .cloned()
            .chain(self.variants.iter().map(|(v, _)| v.clone()))
            .chain(self.stops.iter().cloned())
            .chain(self.invalid.iter().cloned())
            .collect()
    }

    pub fn resources(&self) -> Resources {
        Resources::new(
            StopWordList::from_words(&self.stops),
            PseudoThesaurus::new(&self.stems, self.variants.iter().map(|(v, s)| (v, s))).unwrap(),
        )
    }
}

/// Whole-document term counts computed directly from the lexicon, without
/// sentence splitting or any library preparation code.
pub fn brute_force_counts(text: &str, lex: &Lexicon) -> BTreeMap<String, u64> {
    let stops: HashSet<&str> = lex.stops.iter().map(String::as_str).collect();
    let stems: HashSet<&str> = lex.stems.iter().map(String::as_str).collect();
    let variants: HashMap<&str, &str> = lex.variants.iter().map(|(v, s)| (v.as_str(), s.as_str())).collect();

    let mut counts = BTreeMap::new();
    let mut word = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            let w = std::mem::take(&mut word);
            if stops.contains(w.as_str()) {
                continue;
            }
            let stem = variants.get(w.as_str()).copied().unwrap_or(w.as_str());
            let numeral = stem.chars().all(|c| c.is_numeric());
            if !stops.contains(stem) && (stems.contains(stem) || numeral) {
                *counts.entry(stem.to_owned()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Random text: sentences of random words with mixed case, punctuation
/// and terminators.
pub fn random_text(rng: &mut impl Rng, words: &[String]) -> String {
    let sentences = rng.gen_range(0..7);
    let mut out = String::new();
    for _ in 0..sentences {
        let len = rng.gen_range(0..12);
        for w in 0..len {
            let mut word = words.choose(rng).unwrap().clone();
            if rng.gen_bool(0.1) {
                word = word.to_uppercase();
            }
            if rng.gen_bool(0.05) {
                word = rng.gen_range(0..3000).to_string();
            }
            out.push_str(&word);
            if w + 1 < len {
                out.push_str(if rng.gen_bool(0.1) { ", " } else { " " });
            }
        }
        out.push_str([".", "?", "!"].choose(rng).unwrap());
        out.push_str(if rng.gen_bool(0.5) { " " } else { "\n" });
    }
    out
}

/// Class-separable corpus: each class draws from its own vocabulary, with
/// `noise_rate` of the words drawn from a shared noise vocabulary and a
/// sprinkling of stop words and plural variants.
pub struct SyntheticCorpus {
    pub docs: Vec<Document>,
    pub stems: Vec<String>,
    pub stops: Vec<String>,
}

impl SyntheticCorpus {
    /// Every stem `s` has the variant `ss`.
    pub fn resources(&self) -> Resources {
        Resources::new(
            StopWordList::from_words(&self.stops),
            PseudoThesaurus::new(&self.stems, self.stems.iter().map(|s| (format!("{s}s"), s))).unwrap(),
        )
    }

    /// Writes `corpus.jsonl`, `stopwords.txt` and `thesaurus.tsv` into
    /// `dir`, returning their paths in that order.
    pub fn write_files(&self, dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
        let corpus = dir.join("corpus.jsonl");
        fscmm::corpus_io::write_jsonl(&self.docs, std::fs::File::create(&corpus).unwrap()).unwrap();
        let stops = dir.join("stopwords.txt");
        std::fs::write(&stops, format!("# stop words\n{}\n", self.stops.join("\n"))).unwrap();
        let thes = dir.join("thesaurus.tsv");
        let lines: String = self.stems.iter().map(|s| format!("{s}\n{s}s\t{s}\n")).collect();
        std::fs::write(&thes, lines).unwrap();
        (corpus, stops, thes)
    }
}

pub fn synthetic_corpus(classes: usize, docs_per_class: usize, noise_rate: f64, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class_words: Vec<Vec<String>> = (0..classes)
        .map(|c| (0..25).map(|i| format!("k{c}w{i:02}")).collect())
        .collect();
    // Large enough that some noise terms stay rare.
    let noise: Vec<String> = (0..120).map(|i| format!("shared{i:03}")).collect();
    let stops = ["the", "of", "and", "is"];

    let mut docs = Vec::new();
    for (c, words) in class_words.iter().enumerate() {
        for d in 0..docs_per_class {
            let mut text = String::new();
            for _ in 0..rng.gen_range(3..7) {
                let len = rng.gen_range(4..10);
                let mut sentence = Vec::with_capacity(len);
                for _ in 0..len {
                    let w = if rng.gen_bool(noise_rate) {
                        noise.choose(&mut rng).unwrap().clone()
                    } else if rng.gen_bool(0.1) {
                        stops.choose(&mut rng).unwrap().to_string()
                    } else {
                        words.choose(&mut rng).unwrap().clone()
                    };
                    sentence.push(if rng.gen_bool(0.2) { format!("{w}s") } else { w });
                }
                text.push_str(&sentence.join(" "));
                text.push_str(". ");
            }
            docs.push(Document::labeled(format!("c{c}-d{d:03}"), text.trim_end(), format!("class{c}")));
        }
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));

    SyntheticCorpus {
        docs,
        stems: class_words.into_iter().flatten().chain(noise).collect(),
        stops: stops.map(String::from).to_vec(),
    }
}

/// Two-class problem in `dim` dimensions separated by a random hyperplane
/// `u . x + b0 = 0` (|u| = 1) with every point at distance >= 2, so
/// `w = u / 2` attains functional margin 1 at objective 1/8.
pub struct SeparableProblem {
    pub points: Vec<Vec<f64>>,
    pub positive: Vec<bool>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

pub fn separable_problem(rng: &mut impl Rng, dim: usize, per_side: usize) -> SeparableProblem {
    let mut normal: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
    normal.iter_mut().for_each(|v| *v /= norm);
    let offset = rng.gen_range(-2.0..2.0);

    let (mut points, mut positive) = (Vec::new(), Vec::new());
    let (mut pos, mut neg) = (0, 0);
    while pos < per_side || neg < per_side {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let s: f64 = x.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>() + offset;
        if s.abs() < 2.0 {
            continue;
        }
        if s > 0.0 && pos < per_side {
            pos += 1;
        } else if s < 0.0 && neg < per_side {
            neg += 1;
        } else {
            continue;
        }
        points.push(x);
        positive.push(s > 0.0);
    }
    SeparableProblem { points, positive, normal, offset }
}
