#pragma once

#include "qflat/classify.hpp"
#include "qflat/curves.hpp"
#include "qflat/expmatrix.hpp"
#include "qflat/exppoly.hpp"
#include "qflat/jsonio.hpp"
#include "qflat/moduli.hpp"
#include "qflat/quadric.hpp"
