#include <mpi.h>

void adjacency(void) {
    MPI_Allgather(a, 1, MPI_INT, b, 1, MPI_INT, comm);
    MPI_Allgatherv(a, 1, MPI_INT, b, cnts, dsp, MPI_INT, comm);
    MPI_Gather(s, 1, MPI_INT, r, 1, MPI_INT, 0, comm);
    MPI_Gatherv(s, 1, MPI_INT, r, cnts, dsp, MPI_INT, 0, comm);
    MPI_Alltoall(a, 1, MPI_INT, b, 1, MPI_INT, comm);
    MPI_Alltoallv(a, sc, sd, MPI_INT, b, rc, rd, MPI_INT, comm);
    MPI_Allreduce(x, y, 1, MPI_DOUBLE, MPI_SUM, comm);
    MPI_Reduce(x, y, 1, MPI_DOUBLE, MPI_SUM, 0, comm);
    MPI_Reduce_scatter(x, y, cnts, MPI_DOUBLE, MPI_SUM, comm);
    MPI_Iallreduce(x, y, 1, MPI_DOUBLE, MPI_SUM, comm, &req);
    MPI_Scatterv(s, sc, sd, MPI_INT, r, 1, MPI_INT, 0, comm);
    MPI_GATHER(s, 1, MPI_INT, r, 1, MPI_INT, 0, comm);
    mpi_gather(s, r);
    XMPI_Gather(s, r);
    MY_MPI_Gather(s, r);
}
