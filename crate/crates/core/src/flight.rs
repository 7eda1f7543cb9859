// SPDX-License-Identifier: Apache-2.0

//! Operational budgets: how long a ground target stays in a nadir camera's
//! frame, and what lifting extra mass costs in propulsive power.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

pub const GRAVITY: f64 = 9.81;
pub const SEA_LEVEL_AIR_DENSITY: f64 = 1.225;
/// One two-hop air-to-air plus air-to-ground latency, seconds.
pub const TWO_HOP_LATENCY_S: f64 = 0.84;
/// Cloud round trip built from two two-hop legs.
pub const CLOUD_ROUND_TRIP_S: f64 = 2.0 * TWO_HOP_LATENCY_S;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlightError {
    #[error("ground speed must be positive, got {0} m/s")]
    ZeroSpeed(f64),
    #[error("required power {power} W exceeds the motor envelope of {limit} W")]
    MotorOverload { power: f64, limit: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: &str) -> FlightError {
    FlightError::InvalidParameter {
        field,
        reason: reason.to_owned(),
    }
}

/// Nadir camera described by its diagonal field of view and aspect ratio.
///
/// The short image side lies along the flight track unless
/// `short_side_along_track` is cleared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraParams {
    pub diagonal_fov_deg: f64,
    pub aspect_w: f64,
    pub aspect_h: f64,
    pub short_side_along_track: bool,
}

impl Default for CameraParams {
    fn default() -> Self {
        Self {
            diagonal_fov_deg: 94.0,
            aspect_w: 3.0,
            aspect_h: 2.0,
            short_side_along_track: true,
        }
    }
}

impl CameraParams {
    pub fn new(diagonal_fov_deg: f64, aspect_w: f64, aspect_h: f64) -> Result<Self, FlightError> {
        let cam = Self {
            diagonal_fov_deg,
            aspect_w,
            aspect_h,
            short_side_along_track: true,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<(), FlightError> {
        if !(self.diagonal_fov_deg > 0.0 && self.diagonal_fov_deg < 180.0) {
            return Err(invalid(
                "camera.diagonal_fov",
                "must lie in (0, 180) degrees",
            ));
        }
        if !(self.aspect_w > 0.0 && self.aspect_h > 0.0)
            || !self.aspect_w.is_finite()
            || !self.aspect_h.is_finite()
        {
            return Err(invalid("camera.aspect", "components must be positive"));
        }
        Ok(())
    }
}

/// Ground footprint extents of a nadir camera, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub along_track: f64,
    pub across_track: f64,
}

/// Footprint at `height`: the diagonal half-extent `h·tan(FOV/2)` split
/// onto the image axes in proportion to the aspect ratio.
pub fn ground_coverage(cam: &CameraParams, height: f64) -> Footprint {
    let diag = cam.aspect_w.hypot(cam.aspect_h);
    let half_diag = height * (cam.diagonal_fov_deg.to_radians() / 2.0).tan();
    let (short, long) = if cam.aspect_w <= cam.aspect_h {
        (cam.aspect_w, cam.aspect_h)
    } else {
        (cam.aspect_h, cam.aspect_w)
    };
    let short_extent = 2.0 * half_diag * short / diag;
    let long_extent = 2.0 * half_diag * long / diag;
    if cam.short_side_along_track {
        Footprint {
            along_track: short_extent,
            across_track: long_extent,
        }
    } else {
        Footprint {
            along_track: long_extent,
            across_track: short_extent,
        }
    }
}

/// Seconds a point target stays in frame on a centred straight pass.
pub fn dwell_time(cam: &CameraParams, height: f64, ground_speed: f64) -> Result<f64, FlightError> {
    if ground_speed.is_nan() || ground_speed <= 0.0 {
        return Err(FlightError::ZeroSpeed(ground_speed));
    }
    Ok(ground_coverage(cam, height).along_track / ground_speed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Feasible { margin: f64 },
    Infeasible { margin: f64 },
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    /// `dwell − pipeline_latency`; negative when infeasible.
    pub fn margin(&self) -> f64 {
        match *self {
            Self::Feasible { margin } | Self::Infeasible { margin } => margin,
        }
    }
}

pub fn latency_budget_verdict(dwell: f64, pipeline_latency: f64) -> Verdict {
    let margin = dwell - pipeline_latency;
    if pipeline_latency <= dwell {
        Verdict::Feasible { margin }
    } else {
        Verdict::Infeasible { margin }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotorParams {
    /// rpm per volt.
    pub kv: f64,
    /// Amperes.
    pub no_load_current: f64,
    /// Ohms.
    pub resistance: f64,
    /// Watts.
    pub max_power: f64,
    /// Metres.
    pub prop_diameter: f64,
    /// Metres.
    pub prop_pitch: f64,
    pub efficiency_min: f64,
    pub efficiency_max: f64,
}

impl MotorParams {
    pub fn validate(&self) -> Result<(), FlightError> {
        let positive = [
            self.kv,
            self.no_load_current,
            self.resistance,
            self.max_power,
            self.prop_diameter,
            self.prop_pitch,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("motor", "all parameters must be positive"));
        }
        let eff = 0.0..=1.0;
        if !(eff.contains(&self.efficiency_min)
            && eff.contains(&self.efficiency_max)
            && self.efficiency_min > 0.0
            && self.efficiency_min <= self.efficiency_max)
        {
            return Err(invalid("motor.efficiency", "range must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Speed constant in rad/s per volt.
    pub fn kv_rad(&self) -> f64 {
        self.kv * 2.0 * PI / 60.0
    }

    pub fn prop_disk_area(&self) -> f64 {
        PI * (self.prop_diameter / 2.0).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AircraftKind {
    QuadRotor,
    /// Carries wing area (m²) and lift coefficient.
    FixedWingBimotor {
        wing_area: f64,
        lift_coeff: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftModel {
    pub kind: AircraftKind,
    pub mass: f64,
    pub motor: MotorParams,
    pub drag_coeff: f64,
    pub air_density: f64,
    pub overall_efficiency: f64,
}

impl AircraftModel {
    pub fn quad_rotor(mass: f64, motor: MotorParams) -> Self {
        Self {
            kind: AircraftKind::QuadRotor,
            mass,
            motor,
            drag_coeff: 0.0,
            air_density: SEA_LEVEL_AIR_DENSITY,
            overall_efficiency: 0.8,
        }
    }

    /// Fixed-wing with Cl = 0.3 and unit propulsive efficiency.
    pub fn fixed_wing(mass: f64, motor: MotorParams, wing_area: f64, drag_coeff: f64) -> Self {
        Self {
            kind: AircraftKind::FixedWingBimotor {
                wing_area,
                lift_coeff: 0.3,
            },
            mass,
            motor,
            drag_coeff,
            air_density: SEA_LEVEL_AIR_DENSITY,
            overall_efficiency: 1.0,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Self {
        self.overall_efficiency = efficiency;
        self
    }

    pub fn validate(&self) -> Result<(), FlightError> {
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(invalid("aircraft.mass", "must be >= 0"));
        }
        if !(self.air_density.is_finite() && self.air_density > 0.0) {
            return Err(invalid("aircraft.air_density", "must be > 0"));
        }
        if !(self.overall_efficiency > 0.0 && self.overall_efficiency <= 1.0) {
            return Err(invalid("aircraft.overall_efficiency", "must lie in (0, 1]"));
        }
        if let AircraftKind::FixedWingBimotor {
            wing_area,
            lift_coeff,
        } = self.kind
        {
            if !(wing_area > 0.0 && lift_coeff > 0.0 && self.drag_coeff > 0.0) {
                return Err(invalid(
                    "aircraft.wing",
                    "wing area, lift and drag coefficients must be positive",
                ));
            }
        }
        self.motor.validate()
    }
}

/// Ideal momentum-theory hover power over four rotors,
/// `4·T^{3/2}/√(2ρA)` with `T = m·g/4`, divided by the overall efficiency.
pub fn hover_power(a: &AircraftModel) -> Result<f64, FlightError> {
    if a.kind != AircraftKind::QuadRotor {
        return Err(invalid("aircraft.kind", "hover power needs a quad rotor"));
    }
    a.validate()?;
    let thrust = a.mass * GRAVITY / 4.0;
    let per_rotor = thrust.powf(1.5) / (2.0 * a.air_density * a.motor.prop_disk_area()).sqrt();
    let power = 4.0 * per_rotor / a.overall_efficiency;
    let limit = 4.0 * a.motor.max_power;
    if power > limit {
        return Err(FlightError::MotorOverload { power, limit });
    }
    Ok(power)
}

/// Level-flight speed from lift balance, m/s.
pub fn fixed_wing_level_speed(a: &AircraftModel) -> Result<f64, FlightError> {
    let AircraftKind::FixedWingBimotor {
        wing_area,
        lift_coeff,
    } = a.kind
    else {
        return Err(invalid("aircraft.kind", "level flight needs a fixed wing"));
    };
    a.validate()?;
    Ok((2.0 * a.mass * GRAVITY / (a.air_density * wing_area * lift_coeff)).sqrt())
}

/// Aerodynamic drag power `½·ρ·V³·S·Cd` at the level-flight speed.
pub fn fixed_wing_level_power(a: &AircraftModel) -> Result<f64, FlightError> {
    let v = fixed_wing_level_speed(a)?;
    let AircraftKind::FixedWingBimotor { wing_area, .. } = a.kind else {
        unreachable!("checked by fixed_wing_level_speed");
    };
    Ok(0.5 * a.air_density * v.powi(3) * wing_area * a.drag_coeff / a.overall_efficiency)
}

/// Operating point of a brushed-equivalent DC motor model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorOperatingPoint {
    pub current: f64,
    pub voltage: f64,
    pub power: f64,
}

/// Electrical input for a shaft `torque` (N·m) at `speed` (rpm):
/// `I = τ·Kv + I0`, `V = ω/Kv + I·R`.
pub fn motor_operating_point(
    m: &MotorParams,
    torque: f64,
    speed_rpm: f64,
) -> Result<MotorOperatingPoint, FlightError> {
    if !(torque >= 0.0 && speed_rpm >= 0.0) {
        return Err(invalid(
            "motor.operating_point",
            "torque and speed must be >= 0",
        ));
    }
    let kv = m.kv_rad();
    let torque_constant = 1.0 / kv;
    let current = torque / torque_constant + m.no_load_current;
    let omega = speed_rpm * 2.0 * PI / 60.0;
    let voltage = omega / kv + current * m.resistance;
    let power = voltage * current;
    if power > m.max_power {
        return Err(FlightError::MotorOverload {
            power,
            limit: m.max_power,
        });
    }
    Ok(MotorOperatingPoint {
        current,
        voltage,
        power,
    })
}

pub fn motor_electrical_power(
    m: &MotorParams,
    torque: f64,
    speed_rpm: f64,
) -> Result<f64, FlightError> {
    motor_operating_point(m, torque, speed_rpm).map(|p| p.power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::PresetCatalog;
    use proptest::prelude::*;

    fn x2212() -> MotorParams {
        PresetCatalog.motor("x2212").unwrap().params
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Casts the four frustum corner rays onto the ground plane and measures
    /// the footprint extents.
    fn ray_cast_footprint(fov_deg: f64, w: f64, h: f64, height: f64) -> (f64, f64) {
        // Image plane at unit focal distance; corner (±kw, ±kh, 1) subtends
        // half the diagonal FOV.
        let k = (fov_deg.to_radians() / 2.0).tan() / (w * w + h * h).sqrt();
        let corners = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
        let hits: Vec<(f64, f64)> = corners
            .iter()
            .map(|(sx, sy)| {
                let dir = [sx * k * w, sy * k * h, 1.0];
                let t = height / dir[2];
                (dir[0] * t, dir[1] * t)
            })
            .collect();
        let span = |f: fn(&(f64, f64)) -> f64| {
            let vals: Vec<f64> = hits.iter().map(f).collect();
            vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min)
        };
        (span(|p| p.1), span(|p| p.0))
    }

    #[test]
    fn coverage_examples() {
        let cam = CameraParams::default();
        assert_eq!(
            ground_coverage(&cam, 0.0),
            Footprint {
                along_track: 0.0,
                across_track: 0.0
            }
        );
        let fp = ground_coverage(&cam, 10.0);
        assert!(
            (fp.along_track - 11.8973).abs() < 1e-3,
            "{}",
            fp.along_track
        );
        assert!(
            (fp.across_track - 17.846).abs() < 1e-3,
            "{}",
            fp.across_track
        );
        let fp2 = ground_coverage(&cam, 20.0);
        assert_eq!(fp2.along_track, 2.0 * fp.along_track);
        assert_eq!(fp2.across_track, 2.0 * fp.across_track);
    }

    #[test]
    fn coverage_matches_ray_casting() {
        for (fov, w, h, height) in [
            (94.0, 3.0, 2.0, 10.0),
            (60.0, 16.0, 9.0, 37.5),
            (120.0, 4.0, 3.0, 3.0),
        ] {
            let cam = CameraParams::new(fov, w, h).unwrap();
            let fp = ground_coverage(&cam, height);
            let (along, across) = ray_cast_footprint(fov, w, h, height);
            assert!(rel(fp.along_track, along) < 1e-12);
            assert!(rel(fp.across_track, across) < 1e-12);
        }
    }

    #[test]
    fn orientation_switch() {
        let cam = CameraParams {
            short_side_along_track: false,
            ..CameraParams::default()
        };
        let fp = ground_coverage(&cam, 10.0);
        assert!(fp.along_track > fp.across_track);
    }

    #[test]
    fn dwell_examples() {
        let cam = CameraParams::default();
        assert!((dwell_time(&cam, 10.0, 5.0).unwrap() - 2.3795).abs() < 1e-3);
        assert!((dwell_time(&cam, 20.0, 5.0).unwrap() - 4.7589).abs() < 1e-3);
        assert!(dwell_time(&cam, 10.0, 1000.0).unwrap() < dwell_time(&cam, 10.0, 100.0).unwrap());
        assert_eq!(
            dwell_time(&cam, 10.0, 0.0),
            Err(FlightError::ZeroSpeed(0.0))
        );
        assert!(dwell_time(&cam, 10.0, -1.0).is_err());
    }

    #[test]
    fn verdict_examples() {
        let cam = CameraParams::default();
        let v = latency_budget_verdict(dwell_time(&cam, 10.0, 5.0).unwrap(), CLOUD_ROUND_TRIP_S);
        assert!(v.is_feasible());
        assert!((v.margin() - 0.6995).abs() < 1e-3);
        let v = latency_budget_verdict(dwell_time(&cam, 10.0, 10.0).unwrap(), CLOUD_ROUND_TRIP_S);
        assert!(!v.is_feasible());
        assert!(latency_budget_verdict(0.0, 0.0).is_feasible());
        assert_eq!(CLOUD_ROUND_TRIP_S, 1.68);
    }

    #[test]
    fn hover_examples() {
        let quad = AircraftModel::quad_rotor(0.5, x2212()).with_efficiency(1.0);
        assert!((hover_power(&quad).unwrap() - 15.42).abs() < 0.01);
        assert_eq!(hover_power(&quad.with_mass(0.0)).unwrap(), 0.0);
        assert!(hover_power(&quad.with_mass(1e-6)).unwrap() < 1e-6);
        let d_small = hover_power(&quad.with_mass(0.75)).unwrap() - hover_power(&quad).unwrap();
        let d_large = hover_power(&quad.with_mass(3.25)).unwrap()
            - hover_power(&quad.with_mass(3.0)).unwrap();
        assert!((d_small - 12.9).abs() < 0.05, "{d_small}");
        assert!((d_large - 28.9).abs() < 0.05, "{d_large}");
    }

    #[test]
    fn hover_overload() {
        let quad = AircraftModel::quad_rotor(40.0, x2212());
        assert!(matches!(
            hover_power(&quad),
            Err(FlightError::MotorOverload { limit, .. }) if limit == 1560.0
        ));
    }

    #[test]
    fn hover_rejects_fixed_wing() {
        let plane = AircraftModel::fixed_wing(1.0, x2212(), 0.72, 0.05);
        assert!(hover_power(&plane).is_err());
        let quad = AircraftModel::quad_rotor(1.0, x2212());
        assert!(fixed_wing_level_power(&quad).is_err());
    }

    #[test]
    fn fixed_wing_examples() {
        let plane = AircraftModel::fixed_wing(0.5, x2212(), 0.72, 0.05);
        assert!((fixed_wing_level_speed(&plane).unwrap() - 6.089).abs() < 1e-3);
        assert!((fixed_wing_level_power(&plane).unwrap() - 4.98).abs() < 0.01);
        assert_eq!(fixed_wing_level_power(&plane.with_mass(0.0)).unwrap(), 0.0);
        let ratio = fixed_wing_level_power(&plane.with_mass(1.0)).unwrap()
            / fixed_wing_level_power(&plane).unwrap();
        assert!((ratio - 2f64.powf(1.5)).abs() < 1e-9);
    }

    #[test]
    fn motor_examples() {
        let m = x2212();
        assert!((m.kv_rad() - 130.90).abs() < 0.01);
        let p = motor_operating_point(&m, 0.0, 5000.0).unwrap();
        assert_eq!(p.current, 0.6);
        assert!((p.voltage - 4.047).abs() < 1e-3);
        assert!((p.power - 2.43).abs() < 0.005);
        let p = motor_operating_point(&m, 0.0, 0.0).unwrap();
        assert!((p.voltage - 0.0474).abs() < 1e-9);
        assert!((p.power - 0.02844).abs() < 1e-6);
        assert!(matches!(
            motor_electrical_power(&m, 2.0, 10000.0),
            Err(FlightError::MotorOverload { .. })
        ));
    }

    proptest! {
        #[test]
        fn diagonal_consistency(fov in 1.0..179.0f64, w in 0.5..20.0f64, h in 0.5..20.0f64, height in 0.1..500.0f64) {
            let cam = CameraParams::new(fov, w, h).unwrap();
            let fp = ground_coverage(&cam, height);
            let diag = 2.0 * height * (fov.to_radians() / 2.0).tan();
            let lhs = fp.along_track.powi(2) + fp.across_track.powi(2);
            prop_assert!(((lhs - diag * diag) / (diag * diag)).abs() < 1e-9);
        }

        #[test]
        fn dwell_halves_with_double_speed(height in 0.1..500.0f64, v in 0.01..100.0f64) {
            let cam = CameraParams::default();
            prop_assert_eq!(dwell_time(&cam, height, v).unwrap(), 2.0 * dwell_time(&cam, height, 2.0 * v).unwrap());
        }

        #[test]
        fn verdict_monotone_in_dwell(d in 0.0..10.0f64, extra in 0.0..10.0f64, p in 0.0..10.0f64) {
            if latency_budget_verdict(d, p).is_feasible() {
                prop_assert!(latency_budget_verdict(d + extra, p).is_feasible());
            }
        }

        #[test]
        fn motor_power_increases_with_torque(t in 0.0..0.5f64, dt in 1e-4..0.1f64, rpm in 0.0..8000.0f64) {
            let m = MotorParams { max_power: f64::MAX, ..x2212() };
            prop_assert!(motor_electrical_power(&m, t + dt, rpm).unwrap() > motor_electrical_power(&m, t, rpm).unwrap());
        }
    }
}
