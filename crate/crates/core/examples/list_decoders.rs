//! SC, SCL and fast SCL decoding of noisy PAC(128,64) frames: error counts,
//! sorting operations and node visits.

use polarmetric::channel::{AwgnChannel, Channel};
use polarmetric::codes::{rm_profile, CodeSpec};
use polarmetric::decode::{Decoder, DecoderConfig, Mode};
use polarmetric::sim::trial_rng;
use rand::Rng;

pub fn run_example() -> polarmetric::Result<()> {
    let spec = CodeSpec::pac(rm_profile(7, 64)?);
    let channel = Channel::Awgn(AwgnChannel::from_ebn0(2.0, spec.rate())?);
    let trials = 300;
    println!("PAC(128,64) RM profile at 2.0 dB, {trials} frames");
    for (mode, list) in [(Mode::Sc, 1), (Mode::Scl, 8), (Mode::Fscl, 8), (Mode::Scl, 32), (Mode::Fscl, 32)] {
        let mut decoder = Decoder::new(&spec, DecoderConfig::new(mode, list))?;
        let (mut errors, mut sorts, mut visits) = (0, 0, 0);
        let mut llrs = vec![0.0; spec.len()];
        for trial in 0..trials {
            let mut rng = trial_rng(9, 0, trial);
            let data: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
            channel.transmit(&spec.encode(&data)?, &mut rng, &mut llrs);
            let out = decoder.decode(&llrs)?;
            errors += u64::from(out.data != data);
            sorts += out.counters.sort_ops;
            visits += out.counters.node_visits;
        }
        println!(
            "{:>5} L={list:<2}: frame errors {errors:3}, sorts/frame {:6.2}, node visits/frame {:6.1}",
            mode.to_string(),
            sorts as f64 / trials as f64,
            visits as f64 / trials as f64
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
