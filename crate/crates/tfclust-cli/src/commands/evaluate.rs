use std::path::Path;

use tfclust_core::eval::adjusted_rand_index;

use crate::cli::Resolver;
use crate::io;
use crate::Failure;

pub fn execute(r: &Resolver) -> Result<(), Failure> {
    let truth_path = r.require_string("truth")?;
    let preds = r.positionals("pred")?;
    let truth = io::read_labels(Path::new(&truth_path))?;

    let mut rows: Vec<(String, String)> = Vec::with_capacity(preds.len());
    for pred_path in &preds {
        let pred = io::read_labels(Path::new(pred_path))?;
        let score = adjusted_rand_index(&truth, &pred)?;
        let mut cell = format!("{:.6}", score.value);
        if score.degenerate {
            cell.push_str(" (degenerate)");
        }
        rows.push((pred_path.clone(), cell));
        // A result document that carries a refit gets a second row, so the
        // before/after comparison reads off one table.
        if let Some(refit) = io::read_refit_labels(Path::new(pred_path)) {
            let score = adjusted_rand_index(&truth, &refit)?;
            let mut cell = format!("{:.6}", score.value);
            if score.degenerate {
                cell.push_str(" (degenerate)");
            }
            rows.push((format!("{pred_path} (refit)"), cell));
        }
    }

    let name_width = rows
        .iter()
        .map(|(name, _)| name.len())
        .chain(std::iter::once("prediction".len()))
        .max()
        .unwrap_or(0);
    let mut report = format!("{:<name_width$}  ARI\n", "prediction");
    for (name, cell) in &rows {
        report.push_str(&format!("{name:<name_width$}  {cell}\n"));
    }

    print!("{report}");
    if let Some(out) = r.opt_string("out")? {
        io::write_string(Path::new(&out), &report)?;
    }
    Ok(())
}
