//! Grid-sampled coefficients stored as CSV.
//!
//! The first record holds the per-axis node counts; the remaining records
//! hold the samples in row-major order (last axis fastest), any number of
//! values per line. The sample box is the chart domain.

use std::io::Read;

use evoform_core::{Chart, GridSamples};

pub fn read_grid<R: Read>(reader: R, chart: &Chart) -> Result<GridSamples, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = rdr.records();
    let first = records
        .next()
        .ok_or("empty grid file")?
        .map_err(|e| e.to_string())?;
    let counts = first
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| format!("bad axis size `{f}`"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if counts.len() != chart.dimension() {
        return Err(format!(
            "grid has {} axes, chart has dimension {}",
            counts.len(),
            chart.dimension()
        ));
    }
    let mut values = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        for f in rec.iter().filter(|f| !f.is_empty()) {
            let v = f
                .parse::<f64>()
                .map_err(|_| format!("bad sample `{f}` on data line {}", line + 1))?;
            values.push(v);
        }
    }
    GridSamples::new(chart.bounds().to_vec(), counts, values).map_err(|e| e.to_string())
}

pub fn write_grid<W: std::io::Write>(out: W, samples: &GridSamples) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(samples.counts().iter().map(|c| c.to_string()))?;
    let row = *samples.counts().last().unwrap_or(&1);
    for chunk in samples.values().chunks(row.max(1)) {
        w.write_record(chunk.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}
