//! Bit-channel capacities and metric variances after `n` polarization
//! steps, exactly on the BEC and with output quantization on the AWGN channel.

use polarmetric::channel::AwgnChannel;
use polarmetric::polarize::{bec_stats, bit_channel_stats, quantize_awgn, BitChannelStats};

fn summary(label: &str, stats: &[BitChannelStats]) {
    let good = stats.iter().filter(|s| s.capacity > 0.99).count();
    let bad = stats.iter().filter(|s| s.capacity < 0.01).count();
    let spread = stats.iter().filter(|s| s.variance > 0.05).count();
    let mean = stats.iter().map(|s| s.capacity).sum::<f64>() / stats.len() as f64;
    println!(
        "{label:>22}: N={:5} mean capacity {mean:.4}, good {good}, bad {bad}, variance > 0.05 on {spread}",
        stats.len()
    );
}

pub fn run_example() -> polarmetric::Result<()> {
    for n in [4, 6, 8, 10] {
        summary(&format!("BEC(0.3), n={n}"), &bec_stats(0.3, n));
    }
    let awgn = AwgnChannel::from_ebn0(2.5, 0.5)?;
    let w = quantize_awgn(&awgn, 128)?;
    println!("quantized AWGN capacity {:.4}, variance {:.4}", w.capacity(), w.variance());
    for n in [4, 6, 8] {
        summary(&format!("AWGN 2.5 dB, n={n}"), &bit_channel_stats(&w, n, 128)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
