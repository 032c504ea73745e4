//! A small seeded corpus with every check, summarized and written as CSV.

use pandora::harness::{run_corpus, CorpusConfig};

fn main() -> pandora::Result<()> {
    let config = CorpusConfig { count: 40, n_max: 5, m_max: 5, seed: 9, ..CorpusConfig::default() };
    let report = run_corpus(&config);
    print!("{}", report.render_summary());
    for f in report.failures.iter().take(5) {
        println!("failure: {f:?}");
    }
    let path = std::env::temp_dir().join("pandora_corpus.csv");
    report.write_csv(std::fs::File::create(&path)?)?;
    println!("{} rows written to {}", report.rows.len(), path.display());
    Ok(())
}
