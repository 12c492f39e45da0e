// Parse the bundled trace, write it back, and show how a bad row is reported.

use qsched::workload::{parse_trace, parse_trace_str, write_trace, Workload, WorkloadSource, SAMPLE_TRACE};
use qsched::Error;

pub fn run_example() -> qsched::Result<Workload> {
    let sample = Workload::bundled_sample();
    let dir = std::env::temp_dir().join(format!("qsched-round-trip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("trace.csv");
    write_trace(&sample, &path)?;
    let back = parse_trace(&path)?;
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(back, sample);
    assert_eq!(back.to_csv(), SAMPLE_TRACE);
    println!("{} tasks round-tripped, sha256 {}", back.len(), back.checksum());

    let bad = "task_id,arrival_time,duration,cpu_request,mem_request,priority\n0,0,3,1,1,2\n1,0,0,1,1,2\n";
    match parse_trace_str(bad, WorkloadSource::Inline) {
        Err(e @ Error::Validation { .. }) => println!("rejected: {e}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
    Ok(back)
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}
