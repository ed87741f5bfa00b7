#pragma once

#include "ycsae/core.hpp"
#include "ycsae/data.hpp"
#include "ycsae/ea.hpp"
#include "ycsae/experiment.hpp"
#include "ycsae/genome.hpp"
#include "ycsae/learning.hpp"
#include "ycsae/rulebase.hpp"
