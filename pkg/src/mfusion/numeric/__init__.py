from .tensor import ParamStore, as_tensor, check_shape
from .ops import (linear, linear_backward, relu, relu_backward, sigmoid,
                  sigmoid_backward, tanh, tanh_backward, softmax,
                  softmax_backward, layer_norm, layer_norm_backward,
                  lstm_cell, lstm_cell_backward, lstm_forward, lstm_backward,
                  self_attention, self_attention_backward, attention_weights,
                  cross_entropy, cross_entropy_backward, sinusoidal_encoding)
from .optim import Adam, adam_step

__all__ = [
    'ParamStore', 'as_tensor', 'check_shape',
    'linear', 'linear_backward', 'relu', 'relu_backward', 'sigmoid',
    'sigmoid_backward', 'tanh', 'tanh_backward', 'softmax',
    'softmax_backward', 'layer_norm', 'layer_norm_backward',
    'lstm_cell', 'lstm_cell_backward', 'lstm_forward', 'lstm_backward',
    'self_attention', 'self_attention_backward', 'attention_weights',
    'cross_entropy', 'cross_entropy_backward', 'sinusoidal_encoding',
    'Adam', 'adam_step',
]
