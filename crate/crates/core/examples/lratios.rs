//! Winding element, the L-ratio and the cuspidal image order of every rational newform.
//!
//! cargo run --release --example lratios -- 11 14 37 53

use std::sync::Arc;

use modvis::winding::lratio_report;
use modvis::{build_space, rational_newforms, winding_data};

fn main() -> modvis::Result<()> {
    let levels: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let levels = if levels.is_empty() { vec![11, 14, 37, 53] } else { levels };
    for n in levels {
        let space = Arc::new(build_space(n)?);
        if space.genus() == 0 {
            continue;
        }
        let wd = winding_data(&space)?;
        println!("level {n}: e has denominator {}", wd.cuspidal_order);
        for f in rational_newforms(&space)? {
            let r = lratio_report(&f, &wd)?;
            let lr = r.lratio.map(|x| x.to_string()).unwrap_or_else(|| "0".into());
            let cio = r.cuspidal_image_order.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            println!("  {:<6} lratio {lr:<8} image order {cio}", r.form);
        }
    }
    Ok(())
}
