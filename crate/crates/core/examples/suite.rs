use qrule::eval::{run_suite, BenchmarkOptions};
use qrule::{CsvOptions, Dataset};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
    let names: Vec<String> = std::env::args().skip(1).collect();
    let datasets: Vec<(String, Dataset)> = names
        .iter()
        .map(|n| {
            let ds = Dataset::load_csv(format!("{dir}/{n}.csv"), &CsvOptions::default()).unwrap();
            (n.clone(), ds)
        })
        .collect();
    let t = std::time::Instant::now();
    let report = run_suite(&datasets, &BenchmarkOptions::default()).unwrap();
    print!("{}", report.to_text());
    eprintln!("elapsed {:?}", t.elapsed());
}
