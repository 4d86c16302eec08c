"""Forward-secure group signatures from lattices, at toy (insecure) parameters."""

from .ibe import ExtractionCache
from .keys import GroupPublicKey, ManagerSecretKey, TracerSecretKey, UserSecretKey, key_gen, key_update
from .params import PRESETS, MarginError, Params, ParamsError, load_params
from .scheme import REJECT, GroupSignature, open_signature, sign, verify

__all__ = [
    "ExtractionCache", "GroupPublicKey", "GroupSignature", "ManagerSecretKey", "MarginError", "PRESETS",
    "Params", "ParamsError", "REJECT", "TracerSecretKey", "UserSecretKey", "key_gen", "key_update",
    "load_params", "open_signature", "sign", "verify",
]
