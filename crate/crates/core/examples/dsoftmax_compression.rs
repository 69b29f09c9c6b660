//! Parameter cost of the banded low-rank softmax against a full one.
//!
//! cargo run --example dsoftmax_compression -- "5000:152,20000:52,*:12" 200000 500

use aglm::cli::group_thousands;
use aglm::vocab::{band_partition, BandSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec: BandSpec = args.first().map_or("5000:152,20000:52,*:12", String::as_str).parse()?;
    let vocab: usize = args.get(1).map_or(Ok(200_000), |s| s.parse())?;
    let hidden: usize = args.get(2).map_or(Ok(500), |s| s.parse())?;

    let mut total = 0;
    for band in band_partition(vocab, &spec)? {
        let n = hidden * band.rank + band.rank * band.len() + band.len();
        total += n;
        println!("[{},{}) rank {:3}  {:>12}", band.ids.start, band.ids.end, band.rank, group_thousands(n));
    }
    let full = hidden * vocab + vocab;
    println!("banded   {:>12}", group_thousands(total));
    println!("full     {:>12}", group_thousands(full));
    println!("ratio    {:.2}x", full as f64 / total as f64);
    Ok(())
}
