use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    Dispersion,
    FdtIdentity,
    KramersKronig,
    Propagation,
    EnergyConservation,
    PotentialEquivalence,
    BathDecay,
    KernelCheck,
    LangevinStationary,
    BathVsLangevin,
    DrivenSusceptibility,
    EmissionRate,
    Purcell,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub equation: &'static str,
    pub description: &'static str,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::Dispersion,
        Experiment::FdtIdentity,
        Experiment::KramersKronig,
        Experiment::Propagation,
        Experiment::EnergyConservation,
        Experiment::PotentialEquivalence,
        Experiment::BathDecay,
        Experiment::KernelCheck,
        Experiment::LangevinStationary,
        Experiment::BathVsLangevin,
        Experiment::DrivenSusceptibility,
        Experiment::EmissionRate,
        Experiment::Purcell,
    ];

    pub fn info(self) -> ExperimentInfo {
        let (name, equation, description) = match self {
            Experiment::Dispersion => (
                "Dispersion",
                "Eq. (hl:eq2)",
                "low- and high-loss permittivity and conductivity; denominator shift gamma^2/4",
            ),
            Experiment::FdtIdentity => (
                "FdtIdentity",
                "Eq. (eq_fdt6)",
                "noise weight equals (hbar w / pi) sigma on random parameter sets",
            ),
            Experiment::KramersKronig => (
                "KramersKronig",
                "Eq. (eq_fdt1_add)",
                "Hilbert transform of Im eps reproduces Re eps - 1 in both regimes",
            ),
            Experiment::Propagation => (
                "Propagation",
                "Eqs. (hepv:eq2)-(hepv:eq5)",
                "vacuum pulse on a periodic Yee line compared with the exact translate",
            ),
            Experiment::EnergyConservation => (
                "EnergyConservation",
                "Eq. (dch:eq8)",
                "field plus oscillator energy: conserved when lossless, non-increasing when lossy",
            ),
            Experiment::PotentialEquivalence => (
                "PotentialEquivalence",
                "Eqs. (dch:eq15)-(dch:eq17)",
                "Lorenz-gauge potential integrator reproduces the field integrator",
            ),
            Experiment::BathDecay => (
                "BathDecay",
                "Eq. (qd:eq17)",
                "oscillator coupled to a cold discrete bath decays at the rate eta",
            ),
            Experiment::KernelCheck => (
                "KernelCheck",
                "Eq. (qd:eq16)",
                "integral of the bath memory kernel approaches eta",
            ),
            Experiment::LangevinStationary => (
                "LangevinStationary",
                "Eq. (pi:eq2)",
                "Langevin ensemble reaches the stationary moment D / eta",
            ),
            Experiment::BathVsLangevin => (
                "BathVsLangevin",
                "Eqs. (qd:eq17), (pi:eq2)",
                "cold and warm bath ensembles against the matched Langevin model",
            ),
            Experiment::DrivenSusceptibility => (
                "DrivenSusceptibility",
                "Eqs. (cb:eq10a)-(cb:eq11)",
                "driven macroscopic oscillator steady state against both permittivity forms",
            ),
            Experiment::EmissionRate => (
                "EmissionRate",
                "Eq. (qs:eq12)",
                "excited-state population growth under a white field spectrum",
            ),
            Experiment::Purcell => (
                "Purcell",
                "Eq. (qs:eq13)",
                "Im G of a lossy PEC cavity from FDTD against a transfer-matrix oracle",
            ),
        };
        ExperimentInfo {
            name,
            equation,
            description,
        }
    }

    pub fn file_stem(self) -> String {
        let mut out = String::new();
        for (i, c) in self.info().name.chars().enumerate() {
            if c.is_ascii_uppercase() {
                if i > 0 {
                    out.push('_');
                }
                out.push(c.to_ascii_lowercase());
            } else {
                out.push(c);
            }
        }
        out
    }
}

pub fn list_text() -> String {
    let mut out = String::new();
    for e in Experiment::ALL {
        let i = e.info();
        out.push_str(&format!(
            "{:<22} {:<28} {}\n",
            i.name, i.equation, i.description
        ));
    }
    out
}

pub fn list_json() -> String {
    let records: Vec<ExperimentInfo> = Experiment::ALL.iter().map(|e| e.info()).collect();
    serde_json::to_string_pretty(&records).expect("catalog serializes")
}
