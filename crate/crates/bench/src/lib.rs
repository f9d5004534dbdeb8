//! Shared inputs for the benchmarks.

use acovdiff::{ErrorModel, Innovation, MeanSpec, NoiseStream, SmoothComponent, StepSignal};

/// Six-jump signal plus `f1` and MA(1) noise, seeded.
pub fn sample_series(n: usize, seed: u64) -> Vec<f64> {
    let mean = MeanSpec {
        step: StepSignal::six_jump(),
        smooth: SmoothComponent::Linear,
    }
    .evaluate(n)
    .expect("six-jump signal is valid");
    let model = ErrorModel::ma1(0.3, Innovation::Gaussian).expect("valid gamma1");
    let noise = NoiseStream::new(model, seed, 0).generate(n);
    mean.iter().zip(noise).map(|(m, e)| m + e).collect()
}
