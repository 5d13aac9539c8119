use rand_chacha::ChaCha8Rng;
use schn_degradation::rng::derive_rng;
use schn_tensor::{
    add, concat_channels, grid_sample_offsets, leaky_relu, pixel_shuffle, Element, Tensor,
};

use crate::config::SchConfig;
use crate::error::{NetworkError, Result};
use crate::layers::Conv2dLayer;

/// Sub-pixel high-resolution head: channel expansion, depth-to-space, RGB
/// projection. No activations.
#[derive(Clone)]
pub struct HrHead<T: Element> {
    pub expand: Conv2dLayer<T>,
    pub rgb: Conv2dLayer<T>,
}

impl<T: Element> HrHead<T> {
    fn zeros(channels: usize, scale: usize) -> Result<Self> {
        Ok(HrHead {
            expand: Conv2dLayer::zeros(channels, channels * scale * scale, 3)?,
            rgb: Conv2dLayer::zeros(channels, 3, 3)?,
        })
    }

    pub fn forward(&self, feat: &Tensor<T>, scale: usize) -> Result<Tensor<T>> {
        let expanded = self.expand.forward(feat)?;
        let up = pixel_shuffle(&expanded, scale)?;
        self.rgb.forward(&up)
    }
}

/// One spatial-context hallucination module: `n_maps` offset branches, the
/// bilinear warps they drive, a fusion convolution, and an HR head.
#[derive(Clone)]
pub struct SchModule<T: Element> {
    /// Per branch: 3x3 conv (+ activation) then 3x3 conv to 2 offset
    /// channels with no terminal activation.
    pub branches: Vec<(Conv2dLayer<T>, Conv2dLayer<T>)>,
    pub fusion: Conv2dLayer<T>,
    pub head: HrHead<T>,
}

pub struct ModuleOutput<T: Element> {
    pub feat_next: Tensor<T>,
    pub hr: Option<Tensor<T>>,
    pub maps: Vec<Tensor<T>>,
}

impl<T: Element> SchModule<T> {
    /// `mask[b] == false` replaces branch b's warped features with an
    /// explicit zero tensor (ablation semantics); parameters are untouched.
    pub fn forward(
        &self,
        feat: &Tensor<T>,
        mask: &[bool],
        slope: f64,
        scale: usize,
        want_head: bool,
    ) -> Result<ModuleOutput<T>> {
        let mut maps = Vec::with_capacity(self.branches.len());
        let mut parts: Vec<Tensor<T>> = vec![feat.clone()];
        for (b, (conv1, conv2)) in self.branches.iter().enumerate() {
            let hidden = leaky_relu(&conv1.forward(feat)?, slope)?;
            let map = conv2.forward(&hidden)?;
            let warped = if mask.get(b).copied().unwrap_or(true) {
                grid_sample_offsets(feat, &map)?
            } else {
                Tensor::zeros(feat.shape())
            };
            parts.push(warped);
            maps.push(map);
        }
        let refs: Vec<&Tensor<T>> = parts.iter().collect();
        let fused = concat_channels(&refs)?;
        let feat_next = leaky_relu(&self.fusion.forward(&fused)?, slope)?;
        let hr = if want_head {
            Some(self.head.forward(&feat_next, scale)?)
        } else {
            None
        };
        Ok(ModuleOutput {
            feat_next,
            hr,
            maps,
        })
    }
}

/// Which HR heads to evaluate: all of them (training, one loss per module)
/// or only the last (inference; the bypassed heads never affect the final
/// prediction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardMode {
    AllHeads,
    FinalOnly,
}

pub struct SchnOutput<T: Element> {
    /// One HR output per module under `AllHeads` (the last is the final
    /// prediction); a single entry under `FinalOnly`.
    pub hr_outputs: Vec<Tensor<T>>,
    /// Per module, per branch offset fields `[N,2,h,w]`.
    pub maps: Vec<Vec<Tensor<T>>>,
}

impl<T: Element> SchnOutput<T> {
    pub fn final_output(&self) -> &Tensor<T> {
        self.hr_outputs.last().expect("at least one HR output")
    }
}

/// The full model: entry conv + resblock, stacked SCH modules (or a single
/// head when `n_modules == 0`), and a per-branch ablation mask.
pub struct SchnModel<T: Element> {
    pub config: SchConfig,
    pub entry: Conv2dLayer<T>,
    pub res1: Conv2dLayer<T>,
    pub res2: Conv2dLayer<T>,
    pub modules: Vec<SchModule<T>>,
    /// Present only for the degenerate 0-module configuration.
    pub zero_module_head: Option<HrHead<T>>,
    /// `ablation_mask[m][b]` enables module m's branch b warp output.
    /// Defaults to all-true; masking never changes parameter shapes.
    pub ablation_mask: Vec<Vec<bool>>,
}

impl<T: Element> SchnModel<T> {
    /// Fan-in-scaled uniform initialization for every convolution except the
    /// offset-producing branch convolutions, which start at zero so each
    /// hallucination map begins as the identity warp.
    pub fn init_random(config: SchConfig, seed: u64) -> Result<Self> {
        Self::build(config, Some(seed))
    }

    /// All-zero parameters (checkpoint loading fills them in).
    pub fn init_zeros(config: SchConfig) -> Result<Self> {
        Self::build(config, None)
    }

    fn build(config: SchConfig, seed: Option<u64>) -> Result<Self> {
        config.validate()?;
        let c = config.channels;
        let scale = config.scale_factor;
        let mut conv_index = 0u64;
        let mut next_rng = move || {
            let r = seed.map(|s| derive_rng(s, "init", conv_index));
            conv_index += 1;
            r
        };
        let conv =
            |in_ch: usize, out_ch: usize, next: &mut dyn FnMut() -> Option<ChaCha8Rng>| {
                match next() {
                    Some(mut rng) => Conv2dLayer::random(in_ch, out_ch, 3, &mut rng),
                    None => Conv2dLayer::zeros(in_ch, out_ch, 3),
                }
            };

        let entry = conv(3, c, &mut next_rng)?;
        let res1 = conv(c, c, &mut next_rng)?;
        let res2 = conv(c, c, &mut next_rng)?;

        let mut modules = Vec::with_capacity(config.n_modules);
        for _ in 0..config.n_modules {
            let mut branches = Vec::with_capacity(config.n_maps);
            for _ in 0..config.n_maps {
                let conv1 = conv(c, c, &mut next_rng)?;
                // zero-initialized regardless of seed: identity warp at start
                let conv2 = Conv2dLayer::zeros(c, 2, 3)?;
                branches.push((conv1, conv2));
            }
            let fusion = conv(c * (config.n_maps + 1), c, &mut next_rng)?;
            let expand = conv(c, c * scale * scale, &mut next_rng)?;
            let rgb = conv(c, 3, &mut next_rng)?;
            modules.push(SchModule {
                branches,
                fusion,
                head: HrHead { expand, rgb },
            });
        }
        let zero_module_head = if config.n_modules == 0 {
            Some(match seed {
                Some(_) => {
                    let expand = conv(c, c * scale * scale, &mut next_rng)?;
                    let rgb = conv(c, 3, &mut next_rng)?;
                    HrHead { expand, rgb }
                }
                None => HrHead::zeros(c, scale)?,
            })
        } else {
            None
        };
        let ablation_mask = vec![vec![true; config.n_maps]; config.n_modules];
        Ok(SchnModel {
            config,
            entry,
            res1,
            res2,
            modules,
            zero_module_head,
            ablation_mask,
        })
    }

    /// Entry stage: conv, activation, then a two-conv resblock with an
    /// additive identity skip.
    pub fn entry_forward(&self, lr: &Tensor<T>) -> Result<Tensor<T>> {
        let slope = self.config.leaky_slope;
        let e = leaky_relu(&self.entry.forward(lr)?, slope)?;
        let r = leaky_relu(&self.res1.forward(&e)?, slope)?;
        let r = self.res2.forward(&r)?;
        Ok(add(&e, &r)?)
    }

    /// Thread features through every module, collecting HR outputs and
    /// hallucination maps. The last HR output is the final prediction.
    pub fn forward(&self, lr: &Tensor<T>, mode: ForwardMode) -> Result<SchnOutput<T>> {
        match lr.shape() {
            [_, 3, _, _] => {}
            other => {
                return Err(NetworkError::Config(format!(
                    "expected [N,3,h,w] input, got {other:?}"
                )))
            }
        }
        let slope = self.config.leaky_slope;
        let scale = self.config.scale_factor;
        let mut feat = self.entry_forward(lr)?;
        let mut hr_outputs = Vec::new();
        let mut maps = Vec::new();
        for (m, module) in self.modules.iter().enumerate() {
            let is_last = m + 1 == self.modules.len();
            let want_head = matches!(mode, ForwardMode::AllHeads) || is_last;
            let out = module.forward(&feat, &self.ablation_mask[m], slope, scale, want_head)?;
            if let Some(hr) = out.hr {
                hr_outputs.push(hr);
            }
            maps.push(out.maps);
            feat = out.feat_next;
        }
        if let Some(head) = &self.zero_module_head {
            hr_outputs.push(head.forward(&feat, scale)?);
        }
        Ok(SchnOutput { hr_outputs, maps })
    }

    /// Set the per-module, per-branch ablation mask (all-true keeps every
    /// hallucination output).
    pub fn set_ablation_mask(&mut self, mask: Vec<Vec<bool>>) -> Result<()> {
        if mask.len() != self.config.n_modules
            || mask.iter().any(|m| m.len() != self.config.n_maps)
        {
            return Err(NetworkError::Config(format!(
                "ablation mask must be {} x {}",
                self.config.n_modules, self.config.n_maps
            )));
        }
        self.ablation_mask = mask;
        Ok(())
    }

    /// Ordered (name, tensor) pairs; the order defines checkpoint layout and
    /// optimizer slot assignment.
    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Tensor<T>)> {
        fn push<'a, T: Element>(
            out: &mut Vec<(String, &'a mut Tensor<T>)>,
            prefix: String,
            layer: &'a mut Conv2dLayer<T>,
        ) {
            out.push((format!("{prefix}.weight"), &mut layer.weight));
            out.push((format!("{prefix}.bias"), &mut layer.bias));
        }
        let mut out: Vec<(String, &mut Tensor<T>)> = Vec::new();
        push(&mut out, "entry".into(), &mut self.entry);
        push(&mut out, "res1".into(), &mut self.res1);
        push(&mut out, "res2".into(), &mut self.res2);
        for (m, module) in self.modules.iter_mut().enumerate() {
            for (b, (c1, c2)) in module.branches.iter_mut().enumerate() {
                push(&mut out, format!("module{m}.branch{b}.conv1"), c1);
                push(&mut out, format!("module{m}.branch{b}.conv2"), c2);
            }
            push(&mut out, format!("module{m}.fusion"), &mut module.fusion);
            push(&mut out, format!("module{m}.head.expand"), &mut module.head.expand);
            push(&mut out, format!("module{m}.head.rgb"), &mut module.head.rgb);
        }
        if let Some(head) = &mut self.zero_module_head {
            push(&mut out, "head.expand".into(), &mut head.expand);
            push(&mut out, "head.rgb".into(), &mut head.rgb);
        }
        out
    }

    /// Same order as [`SchnModel::named_params_mut`], cloning the cheap
    /// tensor handles.
    pub fn named_params(&self) -> Vec<(String, Tensor<T>)> {
        let mut out: Vec<(String, Tensor<T>)> = Vec::new();
        let push = |out: &mut Vec<(String, Tensor<T>)>, prefix: String, layer: &Conv2dLayer<T>| {
            out.push((format!("{prefix}.weight"), layer.weight.clone()));
            out.push((format!("{prefix}.bias"), layer.bias.clone()));
        };
        push(&mut out, "entry".into(), &self.entry);
        push(&mut out, "res1".into(), &self.res1);
        push(&mut out, "res2".into(), &self.res2);
        for (m, module) in self.modules.iter().enumerate() {
            for (b, (c1, c2)) in module.branches.iter().enumerate() {
                push(&mut out, format!("module{m}.branch{b}.conv1"), c1);
                push(&mut out, format!("module{m}.branch{b}.conv2"), c2);
            }
            push(&mut out, format!("module{m}.fusion"), &module.fusion);
            push(&mut out, format!("module{m}.head.expand"), &module.head.expand);
            push(&mut out, format!("module{m}.head.rgb"), &module.head.rgb);
        }
        if let Some(head) = &self.zero_module_head {
            push(&mut out, "head.expand".into(), &head.expand);
            push(&mut out, "head.rgb".into(), &head.rgb);
        }
        out
    }

    pub fn actual_param_count(&self) -> u64 {
        self.named_params()
            .iter()
            .map(|(_, t)| t.numel() as u64)
            .sum()
    }
}
