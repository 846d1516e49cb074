//! Rate profiles and the polar and PAC encoders: carrier, convolutional
//! pre-transform and polar transform of one data word.

use polarmetric::channel::AwgnChannel;
use polarmetric::codes::{ga_profile, rm_profile, CodeSpec, Polynomial};
use polarmetric::decode::sc_decode;
use polarmetric::sim::mc_profile_64_32;

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn run_example() -> polarmetric::Result<()> {
    let rm = rm_profile(5, 16)?;
    let ga = ga_profile(5, 16, &AwgnChannel::from_ebn0(2.5, 0.5)?)?;
    println!("RM(32,16) positions {:?}", rm.info_positions());
    println!("GA(32,16) positions {:?}", ga.info_positions());
    println!("MC(64,32) positions {:?}", mc_profile_64_32().info_positions());

    let poly = Polynomial::default_pac();
    println!("PAC polynomial coefficients {:?}", poly.coeffs());
    let pac = CodeSpec::pac(rm);
    let data: Vec<u8> = (0..16).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
    let enc = pac.encode_full(&data)?;
    println!("data      {}", bits(&data));
    println!("carrier   {}", bits(&enc.carrier));
    println!("precoded  {}", bits(&enc.precoded));
    println!("codeword  {}", bits(&enc.codeword));

    let llrs: Vec<f64> = enc.codeword.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
    assert_eq!(sc_decode(&pac, &llrs)?, data);
    println!("noiseless SC decoding recovers the data word");
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
