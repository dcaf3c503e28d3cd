#ifndef QACAT_QACAT_HPP
#define QACAT_QACAT_HPP

// Everything except the HTTP transport and the CLI.
#include "qacat/algebra.hpp"
#include "qacat/category.hpp"
#include "qacat/constraints.hpp"
#include "qacat/core.hpp"
#include "qacat/document_relations.hpp"
#include "qacat/error.hpp"
#include "qacat/factset_oracle.hpp"
#include "qacat/lattice.hpp"
#include "qacat/llm_oracle.hpp"
#include "qacat/measures.hpp"
#include "qacat/oracle.hpp"
#include "qacat/oracle_cache.hpp"
#include "qacat/ortho.hpp"
#include "qacat/pipeline.hpp"
#include "qacat/rd.hpp"
#include "qacat/relations.hpp"
#include "qacat/rhetoric.hpp"
#include "qacat/text.hpp"
#include "qacat/trace.hpp"

#endif  // QACAT_QACAT_HPP
