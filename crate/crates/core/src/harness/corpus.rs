use super::{parse_scenario, run_scenario, HarnessError, Report, RunOptions};

/// A bundled scenario: its name and source text.
pub type CorpusEntry = (&'static str, &'static str);

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../scenarios/", $name, ".scn")))),*]
    };
}

const CORPUS: &[CorpusEntry] = bundled![
    "bears_mammals",
    "categorical_query",
    "composite_priority",
    "conjunction_implicit",
    "learning_loop",
    "maria_planets",
    "mycin_flu",
    "per_class_confidence",
    "quentin_split",
    "rain_overconfidence",
    "sarcasm_reviews",
    "stale_credal",
    "threshold_consumer",
];

/// The bundled scenarios, sorted by name.
pub fn corpus() -> &'static [CorpusEntry] {
    CORPUS
}

/// Runs every bundled scenario on its own thread. Results come back in
/// corpus order whatever order the runs finish in.
pub fn run_corpus(opts: &RunOptions) -> Vec<(&'static str, Result<Report, HarnessError>)> {
    std::thread::scope(|s| {
        let handles: Vec<_> = CORPUS
            .iter()
            .map(|(name, text)| {
                s.spawn(move || {
                    let file = format!("{name}.scn");
                    let res =
                        parse_scenario(name, &file, text).and_then(|sc| run_scenario(&sc, opts));
                    (*name, res)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}
