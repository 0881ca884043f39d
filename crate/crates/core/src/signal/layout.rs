//! Sensor and impact geometry on the plate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    /// Patch centres (m).
    pub sensors: Vec<[f64; 2]>,
    /// Impact locations (m).
    pub impacts: Vec<[f64; 2]>,
    /// Edge length of the square sensor patches (m).
    pub patch_width: f64,
    /// Plate extent `[Lx, Ly]` (m), if positions should be checked against it.
    #[serde(default)]
    pub plate: Option<[f64; 2]>,
}

impl SensorLayout {
    /// 900 × 1000 mm panel with four 30 mm patches and two impact locations.
    pub fn reference_plate() -> Self {
        let mm = |x: f64, y: f64| [x * 1e-3, y * 1e-3];
        Self {
            sensors: vec![mm(125.0, 125.0), mm(775.0, 125.0), mm(125.0, 875.0), mm(775.0, 875.0)],
            impacts: vec![mm(563.0, 403.0), mm(203.0, 203.0)],
            patch_width: 30e-3,
            plate: Some([0.9, 1.0]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors.is_empty() || self.impacts.is_empty() {
            return Err(invalid("layout", "needs at least one sensor and one impact"));
        }
        if !(self.patch_width >= 0.0) {
            return Err(invalid("patch_width", "must be >= 0"));
        }
        if let Some([lx, ly]) = self.plate {
            let inside = |p: &[f64; 2]| p[0] >= 0.0 && p[0] <= lx && p[1] >= 0.0 && p[1] <= ly;
            if !self.sensors.iter().chain(&self.impacts).all(inside) {
                return Err(invalid("layout", "position outside the plate"));
            }
        }
        for i in 0..self.impacts.len() {
            if distances(self, i)?.iter().any(|&d| d <= 0.0) {
                return Err(invalid("layout", format!("sensor coincides with impact {i}")));
            }
        }
        Ok(())
    }

    pub fn sensor_names(&self) -> Vec<String> {
        (1..=self.sensors.len()).map(|i| format!("S{i}")).collect()
    }
}

/// Centre-to-centre distances from every sensor to one impact.
pub fn distances(layout: &SensorLayout, impact_index: usize) -> Result<Vec<f64>> {
    let imp = layout.impacts.get(impact_index).ok_or(Error::IndexOutOfRange {
        index: impact_index,
        len: layout.impacts.len(),
    })?;
    Ok(layout
        .sensors
        .iter()
        .map(|s| (s[0] - imp[0]).hypot(s[1] - imp[1]))
        .collect())
}

/// Earliest S0 and A0 arrival markers for one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Markers {
    pub t_s0: f64,
    pub t_a0: f64,
}

/// Arrival markers `d_eff / c` with `d_eff` measured to the nearest patch corner,
/// i.e. the centre distance less half the patch diagonal, clamped at zero.
pub fn reference_markers(
    layout: &SensorLayout,
    impact_index: usize,
    c_s0_max: f64,
    c_a0_max: f64,
) -> Result<Vec<Markers>> {
    if !(c_s0_max > 0.0 && c_a0_max > 0.0) {
        return Err(invalid("speeds", "must be > 0"));
    }
    let half_diag = 0.5 * layout.patch_width * std::f64::consts::SQRT_2;
    Ok(distances(layout, impact_index)?
        .into_iter()
        .map(|r| {
            let d_eff = (r - half_diag).max(0.0);
            Markers {
                t_s0: d_eff / c_s0_max,
                t_a0: d_eff / c_a0_max,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_distances() {
        let layout = SensorLayout::reference_plate();
        let d1 = distances(&layout, 0).unwrap();
        let d2 = distances(&layout, 1).unwrap();
        let expect1 = [518.8, 349.6, 643.9, 517.4];
        let expect2 = [110.3, 577.3, 676.5, 882.5];
        for i in 0..4 {
            assert!((d1[i] * 1e3 - expect1[i]).abs() < 0.05, "I1 S{}: {}", i + 1, d1[i]);
            assert!((d2[i] * 1e3 - expect2[i]).abs() < 0.05, "I2 S{}: {}", i + 1, d2[i]);
        }
        assert!(layout.validate().is_ok());
    }

    #[test]
    fn coincident_sensor_has_zero_distance() {
        let mut layout = SensorLayout::reference_plate();
        layout.impacts.push(layout.sensors[2]);
        assert_eq!(distances(&layout, 2).unwrap()[2], 0.0);
        assert!(layout.validate().is_err());
    }

    #[test]
    fn out_of_range_impact() {
        let layout = SensorLayout::reference_plate();
        assert_eq!(
            distances(&layout, 5),
            Err(Error::IndexOutOfRange { index: 5, len: 2 })
        );
    }

    #[test]
    fn markers_without_patch_use_centre_distance() {
        let mut layout = SensorLayout::reference_plate();
        layout.patch_width = 0.0;
        let m = reference_markers(&layout, 0, 5000.0, 2500.0).unwrap();
        let d = distances(&layout, 0).unwrap();
        for (mk, r) in m.iter().zip(d) {
            assert_eq!(mk.t_s0, r / 5000.0);
            assert_eq!(mk.t_a0, r / 2500.0);
        }
    }

    #[test]
    fn i1_s1_marker() {
        let layout = SensorLayout::reference_plate();
        let m = reference_markers(&layout, 0, 5392.0, 3156.0).unwrap();
        assert!((m[0].t_s0 * 1e6 - 92.3).abs() < 0.05);
        assert!((m[0].t_a0 * 1e6 - 157.7).abs() < 0.05);
    }
}
