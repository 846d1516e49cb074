//! Mean and variance of the bit metric on the binary-input AWGN channel:
//! closed forms against a quick Monte-Carlo estimate.

use polarmetric::channel::{
    awgn_llr, j_approx, j_func, k_approx, k_func, metric_variance_awgn, AwgnChannel,
};
use polarmetric::metric::bit_metric;
use polarmetric::sim::trial_rng;
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub fn run_example() -> polarmetric::Result<()> {
    println!("ebn0_db      t      J   J_approx      K   K_approx  variance  sampled_mean");
    for ebn0 in [0.0, 2.5, 5.0, 10.0] {
        let ch = AwgnChannel::from_ebn0(ebn0, 0.5)?;
        let t = ch.t();
        let noise = Normal::new(0.0, ch.sigma()).expect("positive sigma");
        let mut rng = trial_rng(1, 0, 0);
        let samples = 20_000;
        let mut sum = 0.0;
        for _ in 0..samples {
            let bit = rng.random_range(0..2u8);
            let y = 1.0 - 2.0 * f64::from(bit) + noise.sample(&mut rng);
            sum += bit_metric(awgn_llr(y, &ch)?.value(), bit);
        }
        println!(
            "{ebn0:7.1} {t:6.3} {:6.4} {:10.4} {:6.4} {:10.4} {:9.4} {:13.4}",
            j_func(t),
            j_approx(t),
            k_func(t),
            k_approx(t),
            metric_variance_awgn(t),
            sum / samples as f64
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
