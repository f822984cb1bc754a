//! CSV export of profiles with per-scale defects.

use std::io::Write;

use crate::error::Result;
use crate::frequency::scales::ScaleClassification;

/// Columns `j,r,H,D,I,N,defect0,...,defect{m-1},bad_flag`; undefined defects
/// are written as `nan`.
pub fn write_profile_csv(w: &mut impl Write, c: &ScaleClassification) -> Result<()> {
    let m = c.profile.m;
    let mut header = String::from("j,r,H,D,I,N");
    for k in 0..m {
        header.push_str(&format!(",defect{k}"));
    }
    header.push_str(",bad_flag");
    writeln!(w, "{header}")?;
    let p = &c.profile;
    for j in 0..p.len() {
        let mut line = format!(
            "{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.radii[j], p.h[j], p.d[j], p.i[j], p.n(j)
        );
        for k in 0..m {
            let v = c.defects[j].as_ref().map_or(f64::NAN, |d| d[k]);
            line.push_str(&format!(",{v:.16e}"));
        }
        line.push_str(&format!(",{}", u8::from(c.bad[j])));
        writeln!(w, "{line}")?;
    }
    Ok(())
}
