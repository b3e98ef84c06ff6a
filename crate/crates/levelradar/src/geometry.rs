//! Mount geometry and the conversions between two-way delay, range, and
//! liquid level.
//!
//! The radar is mounted above the container looking straight down at the
//! liquid surface. A reflection with two-way time of flight `tof` sits at
//! range `c * tof / 2`, and the liquid level is the mount height minus that
//! range, clamped to the physically possible fill interval.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Where the radar sits relative to the container.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MountGeometry {
    /// Height of the antenna plane above the container bottom, meters.
    pub radar_height: f64,
    /// Largest fill level the container can hold, meters.
    pub max_level: f64,
}

impl Default for MountGeometry {
    fn default() -> Self {
        MountGeometry {
            radar_height: 0.30,
            max_level: 0.12,
        }
    }
}

impl MountGeometry {
    /// Builds a geometry, requiring `0 < max_level < radar_height`.
    pub fn new(radar_height: f64, max_level: f64) -> Result<Self> {
        let geometry = MountGeometry {
            radar_height,
            max_level,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// Checks `0 < max_level < radar_height` with both finite.
    pub fn validate(&self) -> Result<()> {
        if !self.radar_height.is_finite() || !self.max_level.is_finite() {
            return Err(Error::InvalidParameter(
                "mount geometry must be finite".into(),
            ));
        }
        if !(self.max_level > 0.0 && self.max_level < self.radar_height) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < max_level < radar_height, got max_level {}, radar_height {}",
                self.max_level, self.radar_height
            )));
        }
        Ok(())
    }

    /// Liquid level implied by a reflection at `range` meters, clamped to
    /// `[0, max_level]`.
    pub fn level_from_range(&self, range: f64) -> f64 {
        (self.radar_height - range).clamp(0.0, self.max_level)
    }

    /// Liquid level implied by a two-way delay, clamped like
    /// [`MountGeometry::level_from_range`].
    pub fn level_from_tof(&self, tof: f64) -> f64 {
        self.level_from_range(SPEED_OF_LIGHT * tof / 2.0)
    }

    /// Two-way delay of a surface sitting at `level` meters of fill.
    pub fn level_to_tof(&self, level: f64) -> f64 {
        2.0 * (self.radar_height - level) / SPEED_OF_LIGHT
    }
}

/// One-way range of a reflection with two-way time of flight `tof` seconds.
pub fn tof_to_range(tof: f64) -> Result<f64> {
    if !tof.is_finite() || tof <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time of flight must be positive and finite, got {tof}"
        )));
    }
    Ok(SPEED_OF_LIGHT * tof / 2.0)
}

/// Two-way time of flight of a reflector at `range` meters.
pub fn range_to_tof(range: f64) -> Result<f64> {
    if !range.is_finite() || range <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "range must be positive and finite, got {range}"
        )));
    }
    Ok(2.0 * range / SPEED_OF_LIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nanoseconds_is_thirty_centimeters() {
        // c * 2e-9 / 2 = 0.299792458 m
        let range = tof_to_range(2.0e-9).unwrap();
        assert!((range - 0.299_792_458).abs() < 1e-12);
    }

    #[test]
    fn range_tof_round_trip() {
        for &range in &[0.05, 0.226, 0.30, 1.7] {
            let back = tof_to_range(range_to_tof(range).unwrap()).unwrap();
            assert!(
                (back - range).abs() <= 1e-15 * range,
                "round trip drifted: {range} -> {back}"
            );
        }
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(tof_to_range(0.0).is_err());
        assert!(tof_to_range(-1.0e-9).is_err());
        assert!(tof_to_range(f64::NAN).is_err());
        assert!(range_to_tof(0.0).is_err());
        assert!(range_to_tof(f64::INFINITY).is_err());
    }

    #[test]
    fn level_is_height_minus_range() {
        let geom = MountGeometry::default();
        let level = geom.level_from_range(0.25);
        assert!((level - 0.05).abs() < 1e-12);
    }

    #[test]
    fn level_clamps_to_fill_interval() {
        let geom = MountGeometry::default();
        // Reflection beyond the container bottom cannot mean a negative level.
        assert_eq!(geom.level_from_range(0.35), 0.0);
        // Reflection closer than the brim clamps to the maximum fill.
        assert_eq!(geom.level_from_range(0.10), geom.max_level);
    }

    #[test]
    fn empty_container_delay() {
        let geom = MountGeometry::default();
        let tof = geom.level_to_tof(0.0);
        assert!((tof - 2.0 * 0.30 / SPEED_OF_LIGHT).abs() < 1e-24);
        assert_eq!(geom.level_from_tof(tof), 0.0);
    }

    #[test]
    fn five_centimeter_fill_delay() {
        // 2 * (0.30 - 0.05) / c = 1.66782e-9 s
        let geom = MountGeometry::default();
        let tof = geom.level_to_tof(0.05);
        assert!((tof - 1.667_820_476_883e-9).abs() < 1e-15);
    }

    #[test]
    fn geometry_validation() {
        assert!(MountGeometry::new(0.30, 0.12).is_ok());
        assert!(MountGeometry::new(0.30, 0.0).is_err());
        assert!(MountGeometry::new(0.30, 0.30).is_err());
        assert!(MountGeometry::new(0.30, 0.35).is_err());
        assert!(MountGeometry::new(f64::NAN, 0.1).is_err());
    }
}
