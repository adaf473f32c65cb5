"""feedback-learn: gradient-free neural network training by function inversion.

A negative feedback loop with a high-gain forward block computes the
inverse of whatever sits in its feedback path. Putting a network's
input-output map there and feeding it the targets turns the loop output
into the weights, giving a training rule that needs only the signs of the
backward gains, never their derivatives. Gradient descent and sign-based
descent fall out as particular sign-policy choices.

Hot kernels run in a compiled extension when available, with a
bitwise-identical pure-Python fallback (see feedback_learn.backend).
"""

from .activations import (
    Activation,
    ActivationKind,
    activation_tag,
    apply_activation,
    gain_from_output,
    gain_sign,
    parse_activation,
)
from .backend import backend_name
from .data import (
    LabelEncoding,
    PreparedDataset,
    RawDataset,
    batch_iterator,
    load_idx_images,
    load_idx_labels,
    make_staircase_dataset,
    one_hot,
    prepare,
    save_idx_images,
    save_idx_labels,
)
from .deep import (
    DeepLayer,
    DeepModel,
    DeepTrainConfig,
    LayerSpec,
    adaptive_rate_update,
    backpropagate_difference,
    build_model,
    deep_train_step,
    evaluate,
    fit_deep,
    forward_pass,
    layer_error,
    load_checkpoint,
    predict,
    save_checkpoint,
)
from .errors import (
    BadMagicError,
    CheckpointError,
    FeedbackLearnError,
    IdxFormatError,
    NonFiniteError,
    ShapeMismatchError,
    TruncatedFileError,
    UnsupportedPolicyError,
)
from .feedback import FeedbackConfig, LoopTrace, is_stable, run_feedback_loop
from .matrix import Matrix
from .policies import PolicyKind, SignPolicy, apply_sign_policy, parse_policy, policy_tag, sgn
from .trainer import (
    MetricTrace,
    SingleLayerModel,
    TrainConfig,
    compute_error_matrix,
    fit,
    fit_gd,
    forward_predict,
    gd_baseline_error,
    init_weights,
    train_step,
)

__version__ = "0.1.0"
