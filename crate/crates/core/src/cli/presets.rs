//! Built-in presets. All use `omega2 = 1` as the unit of frequency.

use clap::ValueEnum;

use super::config::{Axis, ConfigLayer, PrimaryColumn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
}

/// A base configuration swept along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetPlan {
    pub name: &'static str,
    pub base: ConfigLayer,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub primary: PrimaryColumn,
}

pub const FIG2_COUPLINGS: [f64; 5] = [0.5, 0.9, 1.0, 1.2, 1.5];
pub const FIG3_ETA2: [f64; 4] = [0.0, 1.0, 2.0, 5.0];
pub const FIG4_COUPLINGS: [f64; 3] = [0.5, 1.0, 1.5];

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn plan(self) -> PresetPlan {
        let fig2 = ConfigLayer {
            omega1: Some(5.0),
            omega2: Some(1.0),
            eta1: Some(0.0),
            eta2: Some(1.0),
            t_max: Some(20.0),
            dt: Some(0.01),
            ..Default::default()
        };
        let fig3 = |eta1: f64, t_max: f64| ConfigLayer {
            omega1: Some(1.0),
            omega2: Some(1.0),
            g_over_gc: Some(1.0),
            eta1: Some(eta1),
            t_max: Some(t_max),
            dt: Some(0.01),
            ..Default::default()
        };
        let (base, axis, values, primary) = match self {
            Preset::Fig2a => (fig2, Axis::GOverGc, FIG2_COUPLINGS.to_vec(), PrimaryColumn::LogNegativity),
            Preset::Fig2b => (fig2, Axis::GOverGc, FIG2_COUPLINGS.to_vec(), PrimaryColumn::Seralian),
            Preset::Fig3a => (fig3(0.0, 20.0), Axis::Eta2, FIG3_ETA2.to_vec(), PrimaryColumn::LogNegativity),
            Preset::Fig3b => (fig3(5.0, 50.0), Axis::Eta2, FIG3_ETA2.to_vec(), PrimaryColumn::LogNegativity),
            Preset::Fig4 => (
                ConfigLayer {
                    // gamma1 = 0.01 omega1, gamma2 = 0.25 omega2, both baths at nbar = 1
                    gamma1: Some(0.05),
                    gamma2: Some(0.25),
                    nbar1: Some(1.0),
                    nbar2: Some(1.0),
                    death_time: Some(true),
                    ..fig2
                },
                Axis::GOverGc,
                FIG4_COUPLINGS.to_vec(),
                PrimaryColumn::LogNegativity,
            ),
        };
        PresetPlan { name: self.name(), base, axis, values, primary }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves_at_every_point() {
        for p in [Preset::Fig2a, Preset::Fig2b, Preset::Fig3a, Preset::Fig3b, Preset::Fig4] {
            let plan = p.plan();
            for &v in &plan.values {
                let cfg = plan.base.with_axis(plan.axis, v).resolve(plan.primary).unwrap();
                assert_eq!(cfg.omega2, 1.0);
            }
        }
        let fig4 = Preset::Fig4.plan().base.with_axis(Axis::GOverGc, 1.5).resolve(PrimaryColumn::LogNegativity);
        let d = fig4.unwrap().dissipation.unwrap();
        assert!((d.gamma1 - 0.01 * 5.0).abs() < 1e-15);
    }
}
