// scratch probe for tuning the synthetic benchmark corpus (not shipped)
use apclust::evaluate::{bench_suite, BenchConfig};
use apclust::features::{build_vocabulary, fit_pca, pca_project, tfidf_transform, TfidfParams};
use apclust::synth::{synthetic_corpus, SynthConfig};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1000);
    let runs: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3);
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);

    let t0 = std::time::Instant::now();
    let corpus = synthetic_corpus(&SynthConfig {
        n_documents: n,
        seed,
        ..SynthConfig::default()
    });
    println!("corpus: {} docs in {:.2}s", corpus.len(), t0.elapsed().as_secs_f64());

    let vocab = build_vocabulary(&corpus).unwrap();
    let tfidf = tfidf_transform(&corpus, &vocab, &TfidfParams);
    println!("tfidf: {} x {} nnz {}", tfidf.rows(), tfidf.cols(), tfidf.nnz());

    let t1 = std::time::Instant::now();
    let k_pca = 100.min(vocab.len());
    let model = fit_pca(&tfidf, k_pca, seed).unwrap();
    let x = pca_project(&model, &tfidf).unwrap();
    println!("pca: {} x {} in {:.2}s", x.rows(), x.cols(), t1.elapsed().as_secs_f64());

    // ceiling: metrics of the gold topic partition
    let topic_names = ["negative", "positive", "neutral"];
    let gold: Vec<usize> = corpus
        .documents
        .iter()
        .map(|d| {
            topic_names
                .iter()
                .position(|t| Some(*t) == d.gold_label.as_deref())
                .unwrap()
        })
        .collect();
    let sizes: Vec<usize> = (0..3).map(|c| gold.iter().filter(|&&g| g == c).count()).collect();
    {
        use apclust::evaluate::{calinski_harabasz, davies_bouldin, silhouette};
        let s = silhouette(&x, &gold, None).unwrap().mean;
        let ch = calinski_harabasz(&x, &gold).unwrap().0;
        let db = davies_bouldin(&x, &gold).unwrap().0;
        println!("gold partition: sil {s:.4} ch {ch:.3} db {db:.3} sizes {sizes:?}");
    }

    let cfg = BenchConfig {
        runs,
        base_seed: seed,
        metric_subsample: 2000,
        ..BenchConfig::default()
    };
    let t2 = std::time::Instant::now();
    let suite = bench_suite(&x, &cfg).unwrap();
    println!("bench: {:.2}s", t2.elapsed().as_secs_f64());

    for algo in ["kmeans", "ap-ahc"] {
        let rows: Vec<_> = suite
            .runs
            .iter()
            .filter(|r| r.algorithm.slug() == algo)
            .collect();
        let sil = median(rows.iter().filter_map(|r| r.report.silhouette.value).collect());
        let ch = median(rows.iter().filter_map(|r| r.report.calinski_harabasz.value).collect());
        let db = median(rows.iter().filter_map(|r| r.report.davies_bouldin.value).collect());
        let ks: Vec<usize> = rows.iter().map(|r| r.report.n_clusters).collect();
        let iters: Vec<usize> = rows.iter().map(|r| r.report.iterations).collect();
        let el: Vec<f64> = rows.iter().map(|r| r.report.elapsed_seconds).collect();
        println!(
            "{algo}: sil {sil:.4} ch {ch:.3} db {db:.3} k {ks:?} iters {iters:?} elapsed {el:.1?}"
        );
        if algo == "ap-ahc" {
            let ex: Vec<usize> = rows
                .iter()
                .map(|r| r.report.exemplars.as_ref().map_or(0, |e| e.len()))
                .collect();
            println!("   exemplar counts {ex:?}");
        }
    }
    for tt in &suite.ttests {
        match &tt.result {
            Some(r) => println!("t-test {}: t {:.3} p {:.3e}", tt.metric, r.t, r.p),
            None => println!("t-test {}: {}", tt.metric, tt.note.as_ref().unwrap()),
        }
    }
}
