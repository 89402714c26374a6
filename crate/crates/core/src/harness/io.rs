//! JSON instance files: an objective plus its matroid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::KernelSpec;
use crate::error::{input, Result};
use crate::matroid::MatroidSpec;
use crate::objective::{CompositeObjective, CompositeTerm, ProblemKind};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::problems::Instance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub name: String,
    pub kind: ProblemKind,
    pub ground_size: usize,
    #[serde(default)]
    pub offset: f64,
    pub terms: Vec<TermFile>,
    pub matroid: MatroidSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub weight: f64,
    pub kernel: KernelSpec,
    pub inner: InnerSpec,
}

/// Inner polynomial, inline or as a reference to a text polynomial file (resolved
/// relative to the instance file).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InnerSpec {
    File {
        file: PathBuf,
    },
    Inline {
        #[serde(default)]
        basis: Basis,
        terms: Vec<(f64, Vec<usize>)>,
    },
}

impl InstanceFile {
    pub fn of(inst: &Instance) -> Self {
        let obj = &inst.objective;
        InstanceFile {
            name: inst.name.clone(),
            kind: inst.kind,
            ground_size: obj.ground_size(),
            offset: obj.offset(),
            terms: obj
                .terms()
                .iter()
                .map(|t| TermFile {
                    weight: t.weight,
                    kernel: KernelSpec::of(&t.kernel),
                    inner: InnerSpec::Inline {
                        basis: t.inner.basis(),
                        terms: t.inner.terms().map(|(k, c)| (c, k.to_vec())).collect(),
                    },
                })
                .collect(),
            matroid: MatroidSpec::of(&inst.matroid),
        }
    }

    /// Builds the instance; `base` resolves relative polynomial file references.
    pub fn build(&self, base: Option<&Path>) -> Result<Instance> {
        let n = self.ground_size;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (j, t) in self.terms.iter().enumerate() {
            let inner = match &t.inner {
                InnerSpec::Inline { basis, terms } => MultilinearPoly::from_terms(
                    n,
                    *basis,
                    terms.iter().map(|(c, vars)| Monomial::new(*c, vars.iter().copied())),
                )?,
                InnerSpec::File { file } => {
                    let path = match base {
                        Some(b) if file.is_relative() => b.join(file),
                        _ => file.clone(),
                    };
                    let p: MultilinearPoly<f64> = std::fs::read_to_string(&path)?.parse()?;
                    if p.ground_size() != n {
                        return input(format!(
                            "term {j}: {} has ground size {}, expected {n}",
                            path.display(),
                            p.ground_size()
                        ));
                    }
                    p
                }
            };
            terms.push(CompositeTerm {
                weight: t.weight,
                kernel: t.kernel.build()?,
                inner,
            });
        }
        Ok(Instance {
            name: self.name.clone(),
            kind: self.kind,
            objective: CompositeObjective::new(n, terms, self.offset)?,
            matroid: self.matroid.build(n)?,
        })
    }
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, serde_json::to_string(&InstanceFile::of(inst))?)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let file: InstanceFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.build(path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_cn_synth, gen_sm_synth, CnSynthParams, SmSynthParams};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for inst in [
            gen_sm_synth(&SmSynthParams::default(), 4).unwrap(),
            gen_cn_synth(&CnSynthParams::default(), 4).unwrap().0,
        ] {
            let path = dir.path().join(format!("{}.json", inst.name));
            save_instance(&inst, &path).unwrap();
            let back = load_instance(&path).unwrap();
            assert_eq!(back.matroid, inst.matroid);
            assert_eq!(back.kind, inst.kind);
            assert_eq!(back.objective.offset(), inst.objective.offset());
            for (a, b) in back.objective.terms().iter().zip(inst.objective.terms()) {
                assert_eq!(a.inner, b.inner);
                assert_eq!(a.kernel, b.kernel);
            }
        }
    }

    #[test]
    fn file_references() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.poly"), "N=2\n1 0\n1 1\n-1 0 1\n").unwrap();
        let json = r#"{"name":"cov","kind":"multilinear","ground_size":2,
            "terms":[{"weight":1.0,"kernel":{"kind":"identity"},"inner":{"file":"g.poly"}}],
            "matroid":{"uniform_k":1}}"#;
        std::fs::write(dir.path().join("cov.json"), json).unwrap();
        let inst = load_instance(dir.path().join("cov.json")).unwrap();
        assert_eq!(inst.objective.exact_value(&[true, true]).unwrap(), 1.0);
        assert_eq!(inst.matroid.rank(), 1);
    }
}
