//! Path pruning with a constant branch threshold and with per-bit
//! thresholds derived from the bit-channel metric variances.

use polarmetric::channel::{AwgnChannel, Channel};
use polarmetric::codes::{rm_profile, CodeSpec};
use polarmetric::decode::{Decoder, DecoderConfig, Mode};
use polarmetric::metric::vpscl_thresholds;
use polarmetric::polarize::{bit_channel_stats, quantize_awgn};
use polarmetric::sim::trial_rng;
use rand::Rng;

pub fn run_example() -> polarmetric::Result<()> {
    let spec = CodeSpec::pac(rm_profile(7, 64)?);
    let construction = AwgnChannel::from_ebn0(2.5, spec.rate())?;
    let stats = bit_channel_stats(&quantize_awgn(&construction, 128)?, spec.n(), 128)?;
    let thresholds = vpscl_thresholds(&stats, 1e-6)?;
    let worst = thresholds.margins.iter().copied().fold(0.0, f64::max);
    println!("largest per-bit margin at P_th = 1e-6: {worst:.1}");

    let configs = [
        ("SCL", DecoderConfig::new(Mode::Scl, 8)),
        ("FSCL", DecoderConfig::new(Mode::Fscl, 8)),
        ("PFSCL m_T=-10", DecoderConfig::new(Mode::Pfscl, 8).with_prune_threshold(-10.0)),
        ("PFSCL m_T=-5", DecoderConfig::new(Mode::Pfscl, 8).with_prune_threshold(-5.0)),
        ("VPSCL P_th=1e-6", DecoderConfig::new(Mode::Vpscl, 8).with_thresholds(thresholds)),
    ];
    let trials = 300;
    for ebn0 in [1.0, 3.0] {
        let channel = Channel::Awgn(AwgnChannel::from_ebn0(ebn0, spec.rate())?);
        println!("PAC(128,64) L=8 at {ebn0} dB, {trials} frames");
        for (label, config) in &configs {
            let mut decoder = Decoder::new(&spec, config.clone())?;
            let (mut errors, mut sorts, mut pruned) = (0, 0, 0);
            let mut llrs = vec![0.0; spec.len()];
            for trial in 0..trials {
                let mut rng = trial_rng(5, 0, trial);
                let data: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
                channel.transmit(&spec.encode(&data)?, &mut rng, &mut llrs);
                let out = decoder.decode(&llrs)?;
                errors += u64::from(out.data != data);
                sorts += out.counters.sort_ops;
                pruned += out.counters.paths_pruned;
            }
            println!(
                "  {label:>16}: frame errors {errors:3}, sorts/frame {:6.2}, pruned/frame {:7.1}",
                sorts as f64 / trials as f64,
                pruned as f64 / trials as f64
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
