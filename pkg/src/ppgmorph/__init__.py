"""Contact-pressure PPG morphology restoration.

Transforms pressure-distorted photoplethysmogram windows into ideal-morphology
waveforms with an adversarially trained encoder/decoder, then derives waveform
agreement metrics and downstream vitals (heart rate, variability, pressure
features) from the result.
"""

__version__ = "0.1.0"

from .core import (DataFormatError, Dataset, DivergenceError, TimeSeries,
                   Window, WindowPair, split_by_subject)
from .downstream import (BoostModel, BpFeatureVector, HrvMetrics, IbiSeries,
                         boost_predict, boost_train, bp_features, estimate_hr,
                         extract_ibis, hf_power, hrv_metrics)
from .fiducials import (Cycle, FeatureVector, FiducialSet, count_peaks,
                        detect_cycles, detect_fiducials, extract_features,
                        segment_cycles, sqi)
from .metrics import MetricReport, dtw, feature_mape, mae, pcc, report
from .model import (Discriminator, Generator, ModelConfig, composite_loss,
                    count_parameters, generator_loss, hinge_d_loss)
from .sigproc import (augment, design_lowpass, detect_troughs,
                      filter_zero_phase, normalize_minmax, pair_and_clean,
                      preprocess_series, read_signal_csv, remove_dc,
                      window_signal)
from .synth import (CANONICAL_CYCLE, CycleParams, DistortionProfile,
                    GroundTruth, apply_cp_distortion, distort_recording,
                    sample_profile, sample_subject_params, synth_cycle,
                    synth_recording)
from .tensor import GradCheckResult, Tensor, grad_check
from .train import (AdamW, CheckpointError, ReduceOnPlateau, TrainConfig,
                    TrainResult, enhance_windows, load_checkpoint,
                    save_checkpoint, train)

__all__ = [name for name in dir() if not name.startswith("_")]
