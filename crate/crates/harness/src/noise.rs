use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Adds white Gaussian noise at `snr_db` (`20 log10(‖y‖/‖w‖)` in
/// expectation) and returns the noisy data with the oracle bound `τ = ‖w‖`.
/// An infinite SNR adds nothing and gives `τ = 0`.
pub fn add_noise(y: &[f64], snr_db: f64, seed: u64) -> (Vec<f64>, f64) {
    if snr_db == f64::INFINITY || y.is_empty() {
        return (y.to_vec(), 0.0);
    }
    let energy = y.iter().map(|v| v * v).sum::<f64>();
    let sigma = (energy / y.len() as f64).sqrt() * 10f64.powf(-snr_db / 20.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..y.len()).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    let tau = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    (y.iter().zip(&w).map(|(a, b)| a + b).collect(), tau)
}
