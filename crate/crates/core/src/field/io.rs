//! Field containers (JSON) and CSV exports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DiscField, Grid3, Regularity, ScalarField3};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Header of a serialized three-dimensional field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FieldHeader<T> {
    pub origin: [T; 3],
    pub spacing: T,
    pub extents: [usize; 3],
    pub regularity: Regularity<T>,
}

/// Self-describing container: header, then values in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FieldContainer<T> {
    pub format: String,
    pub header: FieldHeader<T>,
    pub values: Vec<T>,
}

pub const FIELD_FORMAT: &str = "scalar-field3/v1";

impl<T: Real> From<&ScalarField3<T>> for FieldContainer<T> {
    fn from(f: &ScalarField3<T>) -> Self {
        let g = f.grid();
        FieldContainer {
            format: FIELD_FORMAT.to_string(),
            header: FieldHeader {
                origin: g.origin(),
                spacing: g.spacing(),
                extents: g.extents(),
                regularity: f.regularity(),
            },
            values: f.values().to_vec(),
        }
    }
}

impl<T: Real> FieldContainer<T> {
    pub fn into_field(self) -> Result<ScalarField3<T>> {
        if self.format != FIELD_FORMAT {
            return Err(Error::Parameter(format!(
                "unknown container format {}",
                self.format
            )));
        }
        let grid = Grid3::new(self.header.origin, self.header.spacing, self.header.extents)?;
        ScalarField3::new(grid, self.values, self.header.regularity)
    }
}

pub fn field_to_json<T: Real>(f: &ScalarField3<T>) -> String {
    serde_json::to_string(&FieldContainer::from(f)).expect("field serializes")
}

pub fn field_from_json<T: Real>(s: &str) -> Result<ScalarField3<T>> {
    let c: FieldContainer<T> =
        serde_json::from_str(s).map_err(|e| Error::Parameter(format!("bad field JSON: {e}")))?;
    c.into_field()
}

/// One row per node: `xi1,xi2,xi3,value`.
pub fn write_field_csv<T: Real, W: Write>(f: &ScalarField3<T>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "xi1,xi2,xi3,value")?;
    let g = f.grid();
    for (i, v) in f.values().iter().enumerate() {
        let p = g.point(g.node(i));
        writeln!(
            w,
            "{},{},{},{}",
            to_f64(p[0]),
            to_f64(p[1]),
            to_f64(p[2]),
            to_f64(*v)
        )?;
    }
    Ok(())
}

/// One row per defined node: `x,y,value`.
pub fn write_disc_csv<T: Real, W: Write>(d: &DiscField<T>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,y,value")?;
    for n in d.defined_nodes() {
        let z = d.coord(n);
        writeln!(
            w,
            "{},{},{}",
            to_f64(z.re),
            to_f64(z.im),
            to_f64(d.get(n).unwrap())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_container_round_trip() {
        let g = Grid3::centered_cube([0.0; 3], 0.2, 0.1).unwrap();
        let f = ScalarField3::from_fn(
            g,
            Regularity::C1Alpha {
                alpha: 0.5,
                constant: 2.0,
            },
            |p| p[0] * 3.0 - p[2],
        )
        .unwrap();
        let s = field_to_json(&f);
        assert!(s.contains("\"class\":\"c1_alpha\""));
        let back: ScalarField3<f64> = field_from_json(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let g = Grid3::centered_cube([0.0; 3], 0.2, 0.1).unwrap();
        let f = ScalarField3::from_fn(g, Regularity::Smooth { constant: 0.0 }, |p| p[1]).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 125);
        assert!(text.starts_with("xi1,xi2,xi3,value\n"));
    }
}
