use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use groupoid_logic::io::{
    builtin, lambda_from_map, measure, parse_groupoid, parse_groupoid_unchecked, parse_haar, parse_lambda,
    parse_phase, parse_potential, HaarSpec, MeasureFile,
};
use groupoid_logic::{FiniteGroupoid, MeasuredGroupoid, PhaseAction};

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Built-in name (`pair:n`, `units:n`, `group:z:k`, joined with `+`) or a groupoid file.
    #[arg(value_name = "GROUPOID", required_unless_present = "groupoid_flag")]
    pub groupoid: Option<String>,

    #[arg(long = "groupoid", value_name = "GROUPOID", conflicts_with = "groupoid")]
    pub groupoid_flag: Option<String>,

    /// `uniform`, comma-separated values in object order, or a measure file.
    #[arg(long, default_value = "uniform")]
    pub lambda: String,

    /// `counting`, `normalized`, or a file with fiber weights per morphism.
    #[arg(long)]
    pub haar: Option<String>,

    /// `potential:φ1,φ2,...` or a file mapping morphisms to phases.
    #[arg(long)]
    pub phase: Option<String>,
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))
}

impl Source {
    pub fn spec(&self) -> &str {
        self.groupoid.as_deref().or(self.groupoid_flag.as_deref()).expect("clap requires one")
    }

    fn load(&self, checked: bool) -> Result<FiniteGroupoid> {
        let spec = self.spec();
        if let Some(g) = builtin(spec)? {
            return Ok(g);
        }
        let text = read(spec)?;
        Ok(if checked { parse_groupoid(&text)? } else { parse_groupoid_unchecked(&text)? })
    }

    pub fn groupoid(&self) -> Result<FiniteGroupoid> {
        self.load(true)
    }

    /// Builds the groupoid without rejecting axiom violations.
    pub fn groupoid_unchecked(&self) -> Result<FiniteGroupoid> {
        self.load(false)
    }

    fn haar_spec(&self) -> Result<Option<HaarSpec>> {
        Ok(match self.haar.as_deref() {
            None => None,
            Some(name @ ("counting" | "normalized")) => Some(HaarSpec::Named(name.to_string())),
            Some(path) => Some(parse_haar(&read(path)?)?),
        })
    }

    pub fn measured(&self, g: FiniteGroupoid) -> Result<MeasuredGroupoid> {
        let haar = self.haar_spec()?;
        if Path::new(&self.lambda).is_file() {
            let file: MeasureFile = serde_json::from_str(&read(&self.lambda)?)
                .map_err(|e| groupoid_logic::Error::Parse(e.to_string()))?;
            let lambda = lambda_from_map(&g, &file.lambda)?;
            return Ok(measure(g, lambda, &haar.unwrap_or(file.haar))?);
        }
        let lambda = parse_lambda(&g, &self.lambda)?;
        let haar = haar.unwrap_or_else(|| HaarSpec::Named("normalized".into()));
        Ok(measure(g, lambda, &haar)?)
    }

    pub fn phase(&self, g: &FiniteGroupoid) -> Result<Option<PhaseAction>> {
        let Some(spec) = self.phase.as_deref() else {
            return Ok(None);
        };
        if let Some(p) = parse_potential(g, spec)? {
            return Ok(Some(p));
        }
        Ok(Some(parse_phase(g, &read(spec)?)?))
    }
}
