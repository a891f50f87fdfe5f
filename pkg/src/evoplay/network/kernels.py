"""Forward, backward and training kernels over flattened network arrays.

A compiled network is a topological ordering of nodes with connections
grouped by destination.  Forward evaluation fills a value per node; class
heads go through a stable softmax, regression heads through tanh.
Backward propagates exact deltas in reverse topological order (softmax +
cross-entropy combined at class heads, 1 - a^2 tanh derivatives elsewhere)
and the SGD kernel fuses the per-sample weight update into that pass.

Node activation codes: 0 input (node_arg = feature index), 1 bias,
2 tanh hidden, 3 raw output.
"""

from __future__ import annotations

import math

import numpy as np

from .._backend import jit


@jit
def net_forward(node_act, node_arg, in_start, in_end, conn_src, w, x, values):
    for j in range(node_act.shape[0]):
        a = node_act[j]
        if a == 0:
            values[j] = x[node_arg[j]]
        elif a == 1:
            values[j] = 1.0
        else:
            s = 0.0
            for k in range(in_start[j], in_end[j]):
                s += values[conn_src[k]] * w[k]
            values[j] = math.tanh(s) if a == 2 else s
    return 0


@jit
def net_predict(node_act, node_arg, in_start, in_end, conn_src, w,
                class_pos, reg_pos, x, values, probs, params):
    net_forward(node_act, node_arg, in_start, in_end, conn_src, w, x, values)
    m = values[class_pos[0]]
    for i in range(1, class_pos.shape[0]):
        v = values[class_pos[i]]
        if v > m:
            m = v
    s = 0.0
    for i in range(class_pos.shape[0]):
        e = math.exp(values[class_pos[i]] - m)
        probs[i] = e
        s += e
    for i in range(class_pos.shape[0]):
        probs[i] /= s
    for i in range(reg_pos.shape[0]):
        params[i] = math.tanh(values[reg_pos[i]])
    return 0


@jit
def sample_loss(probs, params, y_action, y_params, mask):
    """Cross-entropy on the labelled action plus masked squared error."""
    p = probs[y_action]
    if p < 1e-300:
        p = 1e-300
    loss = -math.log(p)
    for i in range(params.shape[0]):
        if mask[i] != 0.0:
            d = params[i] - y_params[i]
            loss += d * d
    return loss


@jit
def output_deltas(class_pos, reg_pos, probs, params, y_action, y_params, mask, delta):
    for i in range(class_pos.shape[0]):
        d = probs[i]
        if i == y_action:
            d -= 1.0
        delta[class_pos[i]] = d
    for i in range(reg_pos.shape[0]):
        if mask[i] != 0.0:
            a = params[i]
            delta[reg_pos[i]] = 2.0 * (a - y_params[i]) * (1.0 - a * a)
        else:
            delta[reg_pos[i]] = 0.0
    return 0


@jit
def net_backward(node_act, node_arg, in_start, in_end, conn_src, w,
                 class_pos, reg_pos, x, values, probs, params,
                 y_action, y_params, mask, delta, grad):
    """Forward + exact gradient per connection.  Returns the sample loss."""
    net_predict(node_act, node_arg, in_start, in_end, conn_src, w,
                class_pos, reg_pos, x, values, probs, params)
    loss = sample_loss(probs, params, y_action, y_params, mask)
    for j in range(delta.shape[0]):
        delta[j] = 0.0
    output_deltas(class_pos, reg_pos, probs, params, y_action, y_params, mask, delta)
    for j in range(node_act.shape[0] - 1, -1, -1):
        a = node_act[j]
        if a == 2:
            v = values[j]
            delta[j] *= 1.0 - v * v
        elif a != 3:
            continue  # inputs and bias have no incoming connections
        d = delta[j]
        if d == 0.0:
            for k in range(in_start[j], in_end[j]):
                grad[k] = 0.0
            continue
        for k in range(in_start[j], in_end[j]):
            s = conn_src[k]
            grad[k] = values[s] * d
            delta[s] += w[k] * d
    return loss


@jit
def sgd_epoch(node_act, node_arg, in_start, in_end, conn_src, w,
              class_pos, reg_pos, X, y_actions, Y_params, masks, order,
              alpha, values, probs, params, delta):
    """One true-SGD epoch: per sample in `order`, forward, backward, and an
    in-place weight update fused into the backward sweep.  Returns the mean
    pre-update sample loss."""
    total = 0.0
    for oi in range(order.shape[0]):
        n = order[oi]
        net_predict(node_act, node_arg, in_start, in_end, conn_src, w,
                    class_pos, reg_pos, X[n], values, probs, params)
        total += sample_loss(probs, params, y_actions[n], Y_params[n], masks[n])
        for j in range(delta.shape[0]):
            delta[j] = 0.0
        output_deltas(class_pos, reg_pos, probs, params, y_actions[n],
                      Y_params[n], masks[n], delta)
        for j in range(node_act.shape[0] - 1, -1, -1):
            a = node_act[j]
            if a == 2:
                v = values[j]
                delta[j] *= 1.0 - v * v
            elif a != 3:
                continue
            d = delta[j]
            if d == 0.0:
                continue
            for k in range(in_start[j], in_end[j]):
                s = conn_src[k]
                delta[s] += w[k] * d
                w[k] -= alpha * values[s] * d
    return total / order.shape[0]


@jit
def batch_loss(node_act, node_arg, in_start, in_end, conn_src, w,
               class_pos, reg_pos, X, y_actions, Y_params, masks, idx,
               values, probs, params):
    """Mean loss over the samples selected by idx, without updates."""
    total = 0.0
    for oi in range(idx.shape[0]):
        n = idx[oi]
        net_predict(node_act, node_arg, in_start, in_end, conn_src, w,
                    class_pos, reg_pos, X[n], values, probs, params)
        total += sample_loss(probs, params, y_actions[n], Y_params[n], masks[n])
    return total / idx.shape[0]
