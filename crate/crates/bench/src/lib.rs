//! Fixtures for the criterion benchmarks in `benches/`.

use pedbench::dataset::RawTrackRecord;
use pedbench::synth::{generate_corpus, CorpusTemplate, SynthCorpus};
use pedbench::{PredictionInstance, Split};

/// Seeded synthetic corpus of `n` scenarios with default settings.
pub fn corpus(n: usize) -> SynthCorpus {
    generate_corpus(n, &CorpusTemplate::default(), 7).expect("default template is valid")
}

pub fn raw_records(corpus: &SynthCorpus) -> &[RawTrackRecord] {
    &corpus.records
}

pub fn val_instances(corpus: &SynthCorpus) -> Vec<PredictionInstance> {
    corpus.build.full.iter().filter(|i| i.split == Split::Val).cloned().collect()
}
